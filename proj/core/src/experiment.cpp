#include "nsqn/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "nsqn/dense_bfgs.hpp"
#include "nsqn/errors.hpp"
#include "nsqn/first_order.hpp"

namespace nsqn {

std::string format_row(const MetricsRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.10g,%.10g,%.10g,%zu,%zu,%llu,%llu,%.3f", r.epoch,
                  static_cast<unsigned long long>(r.step), r.loss, r.metric, r.mu, r.n_pairs, r.n_fim,
                  static_cast<unsigned long long>(r.resets), static_cast<unsigned long long>(r.grad_evals), r.wall_ms);
    return buf;
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::EpochsDone: return "epochs done";
        case Termination::KMax: return "k_max";
        case Termination::NumericError: return "numeric error";
    }
    return "?";
}

namespace {

LossGrad finite_gradient(Objective& objective, const ParamVector& w, std::uint64_t k) {
    LossGrad lg = objective.loss_and_grad(w);
    if (!std::isfinite(lg.loss) || !all_finite(lg.grad)) {
        throw NumericError("non-finite loss or gradient at iteration " + std::to_string(k), k);
    }
    return lg;
}

class QuasiNewtonDriver final : public TrainingOptimizer {
public:
    QuasiNewtonDriver(ParamVector w0, const Hyperparams& hp, bool nesterov)
        : hp_(hp), nesterov_(nesterov), state_(AsnaqState::initial(std::move(w0), hp)) {}

    void step(Objective& objective) override {
        report_ = nesterov_ ? asnaq_step(state_, hp_, objective) : adaqn_step(state_, hp_, objective);
    }
    const ParamVector& params() const override { return state_.w; }
    double mu() const override { return nesterov_ ? state_.mu : 0.0; }
    std::size_t n_pairs() const override { return state_.curvature.size(); }
    std::size_t n_fim() const override { return state_.fim.size(); }
    std::uint64_t resets() const override { return state_.resets; }
    std::uint64_t iterations() const override { return state_.k; }
    const AsnaqState* asnaq_state() const override { return &state_; }
    const StepReport* last_report() const override { return &report_; }

private:
    Hyperparams hp_;
    bool nesterov_;
    AsnaqState state_;
    StepReport report_;
};

class AdamDriver final : public TrainingOptimizer {
public:
    AdamDriver(ParamVector w0, const AdamHyper& hyper) : hyper_(hyper), w_(std::move(w0)), state_(w_.size()) {}

    void step(Objective& objective) override {
        const LossGrad lg = finite_gradient(objective, w_, k_);
        adam_step(w_, state_, lg.grad, hyper_);
        ++k_;
    }
    const ParamVector& params() const override { return w_; }
    std::uint64_t iterations() const override { return k_; }

private:
    AdamHyper hyper_;
    ParamVector w_;
    AdamState state_;
    std::uint64_t k_ = 0;
};

class AdagradDriver final : public TrainingOptimizer {
public:
    AdagradDriver(ParamVector w0, const AdagradHyper& hyper)
        : hyper_(hyper), w_(std::move(w0)), state_(w_.size()) {}

    void step(Objective& objective) override {
        const LossGrad lg = finite_gradient(objective, w_, k_);
        adagrad_step(w_, state_, lg.grad, hyper_);
        ++k_;
    }
    const ParamVector& params() const override { return w_; }
    std::uint64_t iterations() const override { return k_; }

private:
    AdagradHyper hyper_;
    ParamVector w_;
    AdagradState state_;
    std::uint64_t k_ = 0;
};

class NaqDriver final : public TrainingOptimizer {
public:
    NaqDriver(ParamVector w0, double mu, double alpha, double eps)
        : mu_(mu), alpha_(alpha), eps_(eps), state_(NaqState::initial(std::move(w0))) {}

    void step(Objective& objective) override {
        naq_full_batch_step(state_, mu_, alpha_, objective, eps_);
        ++k_;
    }
    const ParamVector& params() const override { return state_.w; }
    double mu() const override { return mu_; }
    std::uint64_t iterations() const override { return k_; }
    bool full_batch() const override { return true; }

private:
    double mu_, alpha_, eps_;
    NaqState state_;
    std::uint64_t k_ = 0;
};

class BfgsDriver final : public TrainingOptimizer {
public:
    BfgsDriver(ParamVector w0, double alpha, double eps)
        : alpha_(alpha), eps_(eps), state_(BfgsState::initial(std::move(w0))) {}

    void step(Objective& objective) override {
        bfgs_full_batch_step(state_, alpha_, objective, eps_);
        ++k_;
    }
    const ParamVector& params() const override { return state_.w; }
    std::uint64_t iterations() const override { return k_; }
    bool full_batch() const override { return true; }

private:
    double alpha_, eps_;
    BfgsState state_;
    std::uint64_t k_ = 0;
};

}  // namespace

std::unique_ptr<TrainingOptimizer> make_optimizer(const ExperimentConfig& cfg, ParamVector w0) {
    switch (cfg.optimizer) {
        case OptimizerKind::Asnaq: return std::make_unique<QuasiNewtonDriver>(std::move(w0), cfg.hp, true);
        case OptimizerKind::Adaqn: return std::make_unique<QuasiNewtonDriver>(std::move(w0), cfg.hp, false);
        case OptimizerKind::Adam: return std::make_unique<AdamDriver>(std::move(w0), cfg.adam);
        case OptimizerKind::Adagrad: return std::make_unique<AdagradDriver>(std::move(w0), cfg.adagrad);
        case OptimizerKind::Naq:
            return std::make_unique<NaqDriver>(std::move(w0), cfg.naq_mu, cfg.hp.alpha, cfg.hp.eps_curv);
        case OptimizerKind::Bfgs: return std::make_unique<BfgsDriver>(std::move(w0), cfg.hp.alpha, cfg.hp.eps_curv);
    }
    throw ParameterError("make_optimizer: unknown optimizer");
}

SequenceDataset build_dataset(const ExperimentConfig& cfg) {
    if (cfg.task == Task::Counting) {
        SeededRng rng = SeededRng(cfg.seed).derive("data");
        return gen_counting(cfg.n_samples, cfg.steps, rng);
    }
    const MnistDataset full = load_mnist_idx(cfg.mnist_images, cfg.mnist_labels);
    if (cfg.n_samples > full.n) {
        throw ValidationError("`task.n_samples = " + std::to_string(cfg.n_samples) + "` exceeds the " +
                              std::to_string(full.n) + " samples in " + cfg.mnist_images);
    }
    const MnistDataset subset = full.head(cfg.n_samples);
    if (cfg.task == Task::MnistRow) return row_sequencer(subset);
    return pixel_sequencer(subset, cfg.downsample == 0 ? std::nullopt : std::optional<std::size_t>(cfg.downsample));
}

RnnSpec spec_for(const ExperimentConfig& cfg, const SequenceDataset& data) {
    return RnnSpec{data.samples.n_in, cfg.n_hidden, data.n_classes, data.samples.steps};
}

std::pair<double, double> evaluate_dataset(const ParamVector& w, const RnnSpec& spec, const SequenceDataset& data,
                                           Task task) {
    constexpr std::size_t kChunk = 256;
    const std::size_t n = data.size();
    std::vector<std::size_t> rows;
    double loss_sum = 0.0, metric_sum = 0.0;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t count = std::min(kChunk, n - start);
        rows.resize(count);
        std::iota(rows.begin(), rows.end(), start);
        const SequenceBatch chunk = data.samples.subset(rows);
        const ForwardCache cache = forward(w, spec, chunk);
        const double weight = static_cast<double>(count);
        loss_sum += loss_ce(cache, chunk) * weight;
        metric_sum += (task == Task::Counting ? loss_mse(cache, chunk) : accuracy(cache, chunk)) * weight;
    }
    return {loss_sum / static_cast<double>(n), metric_sum / static_cast<double>(n)};
}

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    const SequenceDataset data = build_dataset(cfg);
    return run_experiment(cfg, data, options);
}

RunSummary run_experiment(const ExperimentConfig& cfg, const SequenceDataset& data, const RunOptions& options) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    };

    const RnnSpec spec = spec_for(cfg, data);
    SeededRng init_rng = SeededRng(cfg.seed).derive("init");
    std::unique_ptr<TrainingOptimizer> opt = make_optimizer(cfg, init_params(spec, init_rng));

    RnnObjective objective(spec, data.samples);
    CountingObjective counted(objective);

    std::ofstream csv;
    if (options.write_files) {
        std::ofstream echo(cfg.output + ".config");
        if (!echo) throw IoError("cannot write " + cfg.output + ".config");
        echo << to_config_text(cfg);
        csv.open(cfg.output);
        if (!csv) throw IoError("cannot write " + cfg.output);
        csv << kMetricsHeader << '\n' << std::flush;
    }

    RunSummary summary;
    std::optional<std::uint64_t> last_logged;
    const auto log_row = [&](std::size_t epoch) {
        const auto [loss, metric] = evaluate_dataset(opt->params(), spec, data, cfg.task);
        MetricsRow row{epoch,         opt->iterations(), loss,           metric,
                       opt->mu(),     opt->n_pairs(),    opt->n_fim(),   opt->resets(),
                       counted.total_calls(), elapsed_ms()};
        if (csv.is_open()) csv << format_row(row) << '\n' << std::flush;
        summary.rows.push_back(row);
        last_logged = opt->iterations();
    };

    const std::size_t n = data.size();
    bool stop = false;
    try {
        for (std::size_t epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
            const auto run_one = [&](const SequenceBatch& batch) {
                objective.set_batch(batch);
                opt->step(counted);
                if (options.observer) {
                    options.observer(StepEvent{*opt, counted.total_calls(), counted.gradient_calls(),
                                               counted.loss_calls(), epoch});
                }
                if (cfg.log_every != 0 && opt->iterations() % cfg.log_every == 0) log_row(epoch);
                if (cfg.hp.k_max != 0 && opt->iterations() >= cfg.hp.k_max) {
                    summary.termination = Termination::KMax;
                    stop = true;
                }
            };

            if (opt->full_batch()) {
                run_one(data.samples);
            } else {
                const BatchPlan plan = minibatches(n, cfg.batch_size, cfg.seed, epoch - 1);
                for (std::size_t i = 0; i < plan.batch_count() && !stop; ++i) {
                    run_one(data.samples.subset(plan.batch(i)));
                }
            }
            if (last_logged != opt->iterations()) log_row(epoch);
        }
    } catch (const NumericError& e) {
        summary.termination = Termination::NumericError;
        summary.message = e.what();
    }

    summary.iterations = opt->iterations();
    summary.wall_ms = elapsed_ms();
    if (!summary.rows.empty()) {
        summary.final_loss = summary.rows.back().loss;
        summary.final_metric = summary.rows.back().metric;
    }
    return summary;
}

}  // namespace nsqn
