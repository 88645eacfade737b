#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nsqn/numkit.hpp"
#include "nsqn/objective.hpp"

namespace nsqn {

/// Dense d×d inverse-Hessian approximation, row-major. Meant for small d:
/// it backs the full-batch BFGS/NAQ baselines and serves as the oracle the
/// limited-memory routines are checked against.
class DenseHessianApprox {
public:
    DenseHessianApprox() = default;

    static DenseHessianApprox identity(std::size_t d);
    static DenseHessianApprox diagonal(const ParamVector& diag);

    std::size_t dim() const noexcept { return d_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_[i * d_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return m_[i * d_ + j]; }
    const std::vector<double>& data() const noexcept { return m_; }

    /// H·x
    ParamVector apply(const ParamVector& x) const;

    /// max |Hᵢⱼ − Hⱼᵢ|
    double asymmetry() const noexcept;

    /// Cholesky succeeds on the symmetric part.
    bool is_positive_definite() const;

    /// In-place BFGS update in expanded rank-two form, O(d²). Assumes H is
    /// symmetric. Throws CurvatureError if sᵀy ≤ 0.
    void absorb(const ParamVector& s, const ParamVector& y);

private:
    explicit DenseHessianApprox(std::size_t d) : d_(d), m_(d * d, 0.0) {}

    std::size_t d_ = 0;
    std::vector<double> m_;
};

/// H' = (I − s yᵀ/yᵀs) H (I − y sᵀ/yᵀs) + s sᵀ/yᵀs, formed with explicit
/// matrix products. Throws CurvatureError if sᵀy ≤ 0.
DenseHessianApprox dense_bfgs_update(const DenseHessianApprox& H, const ParamVector& s, const ParamVector& y);

/// −H·grad with H obtained by applying dense_bfgs_update to diag(h0) for each
/// (s, y) pair in order. Reference for two_loop_direction.
ParamVector dense_direction(const ParamVector& grad, const std::vector<std::pair<ParamVector, ParamVector>>& pairs,
                            const ParamVector& h0);

struct NaqState {
    ParamVector w;
    ParamVector v;
    DenseHessianApprox H;

    static NaqState initial(ParamVector w0);
};

struct FullBatchReport {
    double loss = 0.0;  ///< loss at the point the direction was taken
    ParamVector grad;   ///< gradient at that point
    bool updated = false;
    std::uint64_t gradient_calls = 0;
};

/// Nesterov accelerated quasi-Newton step on the full objective:
/// g = −H ∇E(w+μv), v' = μv + αg, w' = w + v', then H absorbs
/// s = w' − (w+μv), y = ∇E(w') − ∇E(w+μv) when sᵀy > eps·yᵀy.
FullBatchReport naq_full_batch_step(NaqState& state, double mu, double alpha, Objective& objective,
                                    double eps_curv = 1e-8);

/// Plain BFGS with a fixed step, reusing ∇E(w') as the next iteration's
/// gradient so each step costs one evaluation after the first.
struct BfgsState {
    ParamVector w;
    DenseHessianApprox H;
    std::optional<LossGrad> cached;

    static BfgsState initial(ParamVector w0);
};

FullBatchReport bfgs_full_batch_step(BfgsState& state, double alpha, Objective& objective, double eps_curv = 1e-8);

}  // namespace nsqn
