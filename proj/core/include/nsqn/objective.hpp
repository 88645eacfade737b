#pragma once

#include "nsqn/numkit.hpp"

namespace nsqn {

struct LossGrad {
    double loss = 0.0;
    ParamVector grad;
};

/// Stochastic gradient oracle E(·), ∇E(·) over the current mini-batch.
/// Optimizers call it; the harness decides which batch it is bound to.
class Objective {
public:
    virtual ~Objective() = default;

    virtual LossGrad loss_and_grad(const ParamVector& w) = 0;

    /// Loss only. Implementations may skip the backward pass.
    virtual double loss(const ParamVector& w) = 0;
};

/// Wraps another objective and counts every evaluation it forwards.
class CountingObjective final : public Objective {
public:
    explicit CountingObjective(Objective& inner) : inner_(&inner) {}

    LossGrad loss_and_grad(const ParamVector& w) override {
        ++gradient_calls_;
        return inner_->loss_and_grad(w);
    }

    double loss(const ParamVector& w) override {
        ++loss_calls_;
        return inner_->loss(w);
    }

    void rebind(Objective& inner) noexcept { inner_ = &inner; }

    std::uint64_t gradient_calls() const noexcept { return gradient_calls_; }
    std::uint64_t loss_calls() const noexcept { return loss_calls_; }
    std::uint64_t total_calls() const noexcept { return gradient_calls_ + loss_calls_; }

private:
    Objective* inner_;
    std::uint64_t gradient_calls_ = 0;
    std::uint64_t loss_calls_ = 0;
};

}  // namespace nsqn
