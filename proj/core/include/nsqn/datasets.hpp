#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "nsqn/numkit.hpp"
#include "nsqn/rnn.hpp"

namespace nsqn {

/// A whole training set in sequence form plus its class count.
struct SequenceDataset {
    SequenceBatch samples;  ///< batch == number of samples
    std::size_t n_classes = 0;

    std::size_t size() const noexcept { return samples.batch; }
};

/// n binary strings of length T with i.i.d. Bernoulli(0.5) bits; the label is
/// the number of ones, so there are T + 1 classes.
SequenceDataset gen_counting(std::size_t n, std::size_t steps, SeededRng& rng);

/// Grayscale images scaled to [0, 1], row-major [n × rows × cols].
struct MnistDataset {
    std::size_t n = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> images;
    std::vector<int> labels;

    double pixel(std::size_t i, std::size_t r, std::size_t c) const noexcept {
        return images[(i * rows + r) * cols + c];
    }

    /// First `count` samples (all of them if count >= n).
    MnistDataset head(std::size_t count) const;
};

/// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
/// Pixel bytes are divided by 255.
/// Throws FormatError on a bad magic or dimension count, ConsistencyError if
/// the two files disagree on N, IoError on a missing or truncated file.
MnistDataset load_mnist_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Writers for the same format; used to prepare data and in tests.
void write_idx_images(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                      std::span<const std::uint8_t> pixels);
void write_idx_labels(const std::filesystem::path& path, std::span<const std::uint8_t> labels);

/// One row per time step: T = rows, n_in = cols.
SequenceDataset row_sequencer(const MnistDataset& data);

/// One pixel per time step in scanline order. With `side`, the image is first
/// block-averaged down to side × side (side must divide rows and cols).
/// Throws ParameterError on an invalid side.
SequenceDataset pixel_sequencer(const MnistDataset& data, std::optional<std::size_t> side = std::nullopt);

/// Shuffled sample order for one epoch, cut into fixed-size batches. The
/// trailing partial batch is dropped.
struct BatchPlan {
    std::vector<std::size_t> order;
    std::size_t batch_size = 1;
    bool drop_last = true;

    std::size_t batch_count() const noexcept { return order.size() / batch_size; }
    std::span<const std::size_t> batch(std::size_t i) const {
        return std::span<const std::size_t>(order).subspan(i * batch_size, batch_size);
    }
};

/// Permutation of [0, N) determined by (seed, epoch) alone.
/// Throws ParameterError unless 1 <= b <= N.
BatchPlan minibatches(std::size_t n, std::size_t b, std::uint64_t seed, std::uint64_t epoch);

}  // namespace nsqn
