#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nsqn/numkit.hpp"
#include "nsqn/objective.hpp"

namespace nsqn {

/// Shape of a single-layer tanh RNN with a softmax read-out of the final
/// hidden state.
struct RnnSpec {
    std::size_t n_in = 1;
    std::size_t n_hidden = 1;
    std::size_t n_out = 1;
    std::size_t steps = 1;  ///< sequence length T

    /// Throws ParameterError if any dimension is zero.
    void validate() const;

    /// n_in·n_hidden + n_hidden² + n_hidden + n_hidden·n_out + n_out
    std::size_t param_count() const noexcept;

    bool operator==(const RnnSpec&) const = default;
};

/// Offsets of each weight block inside the flat parameter vector.
/// Matrices are row-major with the output unit as the row index.
struct ParamLayout {
    std::size_t w_xh;  ///< n_hidden × n_in
    std::size_t w_hh;  ///< n_hidden × n_hidden
    std::size_t b_h;   ///< n_hidden
    std::size_t w_hy;  ///< n_out × n_hidden
    std::size_t b_y;   ///< n_out
    std::size_t total;

    static ParamLayout of(const RnnSpec& spec) noexcept;
};

/// Mini-batch of fixed-length sequences, inputs laid out [batch × T × n_in].
struct SequenceBatch {
    std::size_t batch = 0;
    std::size_t steps = 0;
    std::size_t n_in = 0;
    std::vector<double> inputs;
    std::vector<int> targets;

    double input(std::size_t b, std::size_t t, std::size_t i) const noexcept {
        return inputs[(b * steps + t) * n_in + i];
    }

    /// Checks shape consistency and that every label is in [0, n_out).
    void validate(const RnnSpec& spec) const;

    /// Batch made of the listed samples, in order.
    SequenceBatch subset(std::span<const std::size_t> rows) const;
};

/// Activations retained for backpropagation.
/// Hidden states are stored time-major: [(T+1) × batch × n_hidden], h_0 = 0.
struct ForwardCache {
    std::size_t batch = 0;
    std::size_t steps = 0;
    std::size_t n_hidden = 0;
    std::size_t n_out = 0;
    std::vector<double> hidden;
    std::vector<double> logits;         ///< batch × n_out
    std::vector<double> probabilities;  ///< batch × n_out

    double hidden_at(std::size_t b, std::size_t t, std::size_t j) const noexcept {
        return hidden[(t * batch + b) * n_hidden + j];
    }
    double probability(std::size_t b, std::size_t c) const noexcept {
        return probabilities[b * n_out + c];
    }
};

/// Floor applied to p(target) before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;

/// Every weight and bias drawn from N(0, 0.01²).
ParamVector init_params(const RnnSpec& spec, SeededRng& rng, double std = 0.01);

ForwardCache forward(const ParamVector& params, const RnnSpec& spec, const SequenceBatch& batch);

/// Mean over the batch of −log p(target).
double loss_ce(const ForwardCache& cache, const SequenceBatch& batch);

/// Mean over batch and classes of (p − onehot)².
double loss_mse(const ForwardCache& cache, const SequenceBatch& batch);

/// Fraction of samples whose arg-max class equals the target.
double accuracy(const ForwardCache& cache, const SequenceBatch& batch);

/// Cross-entropy loss and its exact gradient by full backpropagation through time.
LossGrad backward(const ParamVector& params, const RnnSpec& spec, const SequenceBatch& batch);

/// backward() evaluated at params + mu·v; params is not modified.
LossGrad grad_at_shifted(const ParamVector& params, const ParamVector& v, double mu, const RnnSpec& spec,
                         const SequenceBatch& batch);

using GradientFn = std::function<LossGrad(const ParamVector&, const RnnSpec&, const SequenceBatch&)>;

struct GradCheckOptions {
    double step = 1e-5;
    double param_std = 0.3;  ///< spread of the random point the check is taken at
    GradientFn gradient;     ///< defaults to backward(); replaceable as a test hook
};

/// Max over components of |a − b| / max(1, |a| + |b|) between the analytic
/// gradient and central finite differences, at a random parameter point.
double grad_check(const RnnSpec& spec, const SequenceBatch& batch, SeededRng& rng,
                  const GradCheckOptions& options = {});

/// Objective over one fixed batch; the harness rebinds batches between steps.
class RnnObjective final : public Objective {
public:
    RnnObjective(const RnnSpec& spec, const SequenceBatch& batch) : spec_(spec), batch_(&batch) {}

    LossGrad loss_and_grad(const ParamVector& w) override { return backward(w, spec_, *batch_); }
    double loss(const ParamVector& w) override { return loss_ce(forward(w, spec_, *batch_), *batch_); }

    void set_batch(const SequenceBatch& batch) noexcept { batch_ = &batch; }

private:
    RnnSpec spec_;
    const SequenceBatch* batch_;
};

}  // namespace nsqn
