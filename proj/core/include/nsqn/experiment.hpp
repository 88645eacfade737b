#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsqn/asnaq.hpp"
#include "nsqn/config.hpp"
#include "nsqn/datasets.hpp"
#include "nsqn/rnn.hpp"

namespace nsqn {

inline constexpr const char* kMetricsHeader = "epoch,step,loss,metric,mu,n_pairs,n_fim,resets,grad_evals,wall_ms";

struct MetricsRow {
    std::size_t epoch = 0;
    std::uint64_t step = 0;
    double loss = 0.0;    ///< mean cross-entropy over the training set
    double metric = 0.0;  ///< MSE (counting) or accuracy (MNIST) over the training set
    double mu = 0.0;      ///< 0 for optimizers without momentum
    std::size_t n_pairs = 0;
    std::size_t n_fim = 0;
    std::uint64_t resets = 0;
    std::uint64_t grad_evals = 0;
    double wall_ms = 0.0;
};

/// One CSV line in header order, no trailing newline.
std::string format_row(const MetricsRow& row);

enum class Termination { EpochsDone, KMax, NumericError };
std::string_view to_string(Termination t) noexcept;

struct RunSummary {
    double final_loss = 0.0;
    double final_metric = 0.0;
    double wall_ms = 0.0;
    Termination termination = Termination::EpochsDone;
    std::string message;
    std::uint64_t iterations = 0;
    std::vector<MetricsRow> rows;
};

/// Uniform driver over every optimizer the harness can run.
class TrainingOptimizer {
public:
    virtual ~TrainingOptimizer() = default;

    /// One iteration against the objective's current batch.
    virtual void step(Objective& objective) = 0;

    virtual const ParamVector& params() const = 0;
    virtual double mu() const { return 0.0; }
    virtual std::size_t n_pairs() const { return 0; }
    virtual std::size_t n_fim() const { return 0; }
    virtual std::uint64_t resets() const { return 0; }
    virtual std::uint64_t iterations() const = 0;

    /// Full-batch methods see the whole training set every step.
    virtual bool full_batch() const { return false; }

    /// Present for aSNAQ/adaQN.
    virtual const AsnaqState* asnaq_state() const { return nullptr; }
    virtual const StepReport* last_report() const { return nullptr; }
};

std::unique_ptr<TrainingOptimizer> make_optimizer(const ExperimentConfig& cfg, ParamVector w0);

struct StepEvent {
    const TrainingOptimizer& optimizer;
    std::uint64_t grad_evals;  ///< gradient + loss-only evaluations so far
    std::uint64_t gradient_calls;
    std::uint64_t loss_calls;
    std::size_t epoch;
};

struct RunOptions {
    /// Called after every optimizer step.
    std::function<void(const StepEvent&)> observer;
    /// Skip writing the CSV and config echo.
    bool write_files = true;
};

/// Builds the task's training set: counting strings, or MNIST sequenced by
/// row or pixel (subset to n_samples).
SequenceDataset build_dataset(const ExperimentConfig& cfg);

RnnSpec spec_for(const ExperimentConfig& cfg, const SequenceDataset& data);

/// Mean cross-entropy and task metric over the whole dataset.
std::pair<double, double> evaluate_dataset(const ParamVector& w, const RnnSpec& spec, const SequenceDataset& data,
                                           Task task);

/// Trains per the config, writing the metrics CSV (flushed per row) and an
/// effective-config echo at `<output>.config`. A NumericError ends the run
/// early with the partial CSV kept and the reason recorded in the summary.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Same, over an already-built dataset.
RunSummary run_experiment(const ExperimentConfig& cfg, const SequenceDataset& data, const RunOptions& options = {});

}  // namespace nsqn
