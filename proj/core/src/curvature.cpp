#include "nsqn/curvature.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "nsqn/errors.hpp"

namespace nsqn {

void Hyperparams::validate() const {
    auto fail = [](const std::string& msg) { throw ParameterError("Hyperparams: " + msg); };
    if (!(alpha > 0.0)) fail("alpha must be > 0");
    if (!(mu_min > 0.0)) fail("mu_min must be > 0");
    if (!(mu_min <= mu_max)) fail("mu_min must be <= mu_max");
    if (!(mu_max < 1.0)) fail("mu_max must be < 1");
    if (!(phi > 1.0)) fail("phi must be > 1");
    if (!(gamma >= 1.0)) fail("gamma must be >= 1");
    if (L < 1) fail("L must be >= 1");
    if (m_L < 1) fail("m_L must be >= 1");
    if (m_F < 1) fail("m_F must be >= 1");
    if (!(eps_h0 > 0.0)) fail("eps_h0 must be > 0");
    if (!(eps_curv > 0.0)) fail("eps_curv must be > 0");
}

CurvatureBuffer::CurvatureBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ParameterError("CurvatureBuffer: capacity must be >= 1");
}

bool CurvatureBuffer::try_push(ParamVector s, ParamVector y, double eps) {
    if (!curvature_admit(s, y, eps)) return false;
    const double ys = dot(y, s);
    if (pairs_.size() == capacity_) pairs_.pop_front();
    pairs_.push_back(CurvaturePair{std::move(s), std::move(y), ys});
    return true;
}

FimBuffer::FimBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ParameterError("FimBuffer: capacity must be >= 1");
}

void FimBuffer::push(ParamVector gradient) {
    if (!gradients_.empty()) require_same_length(gradients_.front(), gradient, "FimBuffer::push");
    if (gradients_.size() == capacity_) gradients_.pop_front();
    gradients_.push_back(std::move(gradient));
}

void AccumGradSquares::add(const ParamVector& gradient) {
    require_same_length(sums_, gradient, "AccumGradSquares::add");
    for (std::size_t i = 0; i < gradient.size(); ++i) sums_[i] += gradient[i] * gradient[i];
}

ParamVector h0_diag(const ParamVector& accum, double eps_h0) {
    ParamVector h0(accum.size());
    for (std::size_t i = 0; i < accum.size(); ++i) h0[i] = 1.0 / std::sqrt(accum[i] + eps_h0);
    return h0;
}

ParamVector two_loop_direction(const ParamVector& grad, const CurvatureBuffer& buffer, const ParamVector& h0) {
    require_same_length(grad, h0, "two_loop_direction");
    const auto& pairs = buffer.pairs();
    const std::size_t tau = pairs.size();
    std::vector<double> sigma(tau);

    ParamVector eta = grad;
    for (std::size_t i = tau; i-- > 0;) {
        const auto& p = pairs[i];
        require_same_length(grad, p.s, "two_loop_direction");
        if (p.ys == 0.0) throw InvariantError("two_loop_direction: stored pair has yᵀs = 0");
        sigma[i] = dot(p.s, eta) / p.ys;
        axpy_inplace(-sigma[i], p.y, eta);
    }

    for (std::size_t j = 0; j < eta.size(); ++j) eta[j] *= h0[j];

    for (std::size_t i = 0; i < tau; ++i) {
        const auto& p = pairs[i];
        const double beta = dot(p.y, eta) / p.ys;
        axpy_inplace(sigma[i] - beta, p.s, eta);
    }

    scale_inplace(-1.0, eta);
    return eta;
}

ParamVector fim_y(const FimBuffer& fim, const ParamVector& s) {
    if (fim.empty()) throw ParameterError("fim_y: gradient buffer is empty");
    ParamVector y(s.size());
    for (const ParamVector& g : fim.gradients()) axpy_inplace(dot(g, s), g, y);
    scale_inplace(1.0 / static_cast<double>(fim.size()), y);
    return y;
}

bool curvature_admit(const ParamVector& s, const ParamVector& y, double eps) {
    return dot(s, y) > eps * dot(y, y);
}

}  // namespace nsqn
