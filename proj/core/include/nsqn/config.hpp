#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "nsqn/curvature.hpp"
#include "nsqn/first_order.hpp"

namespace nsqn {

enum class Task { Counting, MnistRow, MnistPixel };
enum class OptimizerKind { Asnaq, Adaqn, Adam, Adagrad, Naq, Bfgs };

std::string_view to_string(Task t) noexcept;
std::string_view to_string(OptimizerKind o) noexcept;

/// Fully resolved experiment description. Produced by parse_config(), which
/// fills every omitted key with its task-dependent default.
struct ExperimentConfig {
    Task task = Task::Counting;
    OptimizerKind optimizer = OptimizerKind::Asnaq;
    std::uint64_t seed = 1;

    Hyperparams hp;
    AdamHyper adam;
    AdagradHyper adagrad;
    double naq_mu = 0.9;  ///< fixed momentum of the full-batch NAQ baseline

    std::size_t n_hidden = 24;
    std::size_t steps = 20;       ///< counting only; MNIST lengths follow the images
    std::size_t downsample = 0;   ///< mnist-pixel only; 0 keeps full resolution
    std::size_t n_samples = 10000;
    std::size_t batch_size = 50;
    std::size_t epochs = 75;
    std::size_t log_every = 0;    ///< extra row every N steps; 0 logs per epoch only

    std::string mnist_images;
    std::string mnist_labels;
    std::string output = "metrics.csv";

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses line-oriented `key = value` text with `#` comments.
/// Throws ConfigError for unknown keys or malformed lines, ValidationError for
/// values outside the bound of their field.
ExperimentConfig parse_config(std::string_view text);

/// Every effective key of `cfg`, one per line, in a form parse_config()
/// reads back to an equal config.
std::string to_config_text(const ExperimentConfig& cfg);

/// Directory holding the MNIST IDX files: $NSQN_DATA_DIR, else "data/mnist".
std::string default_data_dir();

}  // namespace nsqn
