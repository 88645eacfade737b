#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>

#include "nsqn/numkit.hpp"

namespace nsqn {

/// Settings shared by the stochastic quasi-Newton optimizers.
/// Defaults are the values used for every experiment in the reference setup.
struct Hyperparams {
    double alpha = 0.01;  ///< learning rate, constant
    double mu_min = 0.1;
    double mu_max = 0.99;
    double phi = 1.1;     ///< momentum update factor
    double gamma = 1.01;  ///< error-control threshold factor
    std::size_t L = 5;    ///< aggregation period, iterations
    std::size_t m_L = 10; ///< curvature pair capacity
    std::size_t m_F = 100;///< gradient (aFIM) buffer capacity
    double eps_h0 = 1e-8;
    double eps_curv = 1e-8;
    std::uint64_t k_max = 0;  ///< iteration budget; 0 means unbounded

    /// Throws ParameterError naming the first violated bound.
    void validate() const;

    bool operator==(const Hyperparams&) const = default;
};

struct CurvaturePair {
    ParamVector s;
    ParamVector y;
    double ys = 0.0;  ///< cached yᵀs
};

/// FIFO of admitted (s, y) pairs, oldest first.
class CurvatureBuffer {
public:
    explicit CurvatureBuffer(std::size_t capacity);

    /// Stores the pair if curvature_admit(s, y, eps) holds, evicting the
    /// oldest pair when full. Returns whether it was stored.
    bool try_push(ParamVector s, ParamVector y, double eps);

    void clear() noexcept { pairs_.clear(); }
    std::size_t size() const noexcept { return pairs_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return pairs_.empty(); }
    const std::deque<CurvaturePair>& pairs() const noexcept { return pairs_; }

private:
    std::size_t capacity_;
    std::deque<CurvaturePair> pairs_;
};

/// FIFO of raw gradients standing in for the accumulated Fisher matrix
/// (1/|F|) Σ gᵢgᵢᵀ. Outer products are never formed.
class FimBuffer {
public:
    explicit FimBuffer(std::size_t capacity);

    void push(ParamVector gradient);
    void clear() noexcept { gradients_.clear(); }
    std::size_t size() const noexcept { return gradients_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return gradients_.empty(); }
    const std::deque<ParamVector>& gradients() const noexcept { return gradients_; }

private:
    std::size_t capacity_;
    std::deque<ParamVector> gradients_;
};

/// Running elementwise Σ g² over every gradient added. Never reset.
class AccumGradSquares {
public:
    explicit AccumGradSquares(std::size_t d) : sums_(d) {}

    void add(const ParamVector& gradient);
    const ParamVector& values() const noexcept { return sums_; }

private:
    ParamVector sums_;
};

/// Diagonal initial inverse Hessian 1/√(Σg² + ε), elementwise.
ParamVector h0_diag(const ParamVector& accum, double eps_h0);
inline ParamVector h0_diag(const AccumGradSquares& accum, double eps_h0) {
    return h0_diag(accum.values(), eps_h0);
}

/// Limited-memory BFGS direction g = −H·grad via the two-loop recursion,
/// with H built from the buffered pairs (oldest first) over diag(h0).
/// Empty buffer gives −h0 ⊙ grad.
ParamVector two_loop_direction(const ParamVector& grad, const CurvatureBuffer& buffer, const ParamVector& h0);

/// y = (1/|F|) Σ gᵢ (gᵢᵀ s). Throws ParameterError when the buffer is empty.
ParamVector fim_y(const FimBuffer& fim, const ParamVector& s);

/// sᵀy > eps · yᵀy
bool curvature_admit(const ParamVector& s, const ParamVector& y, double eps);

}  // namespace nsqn
