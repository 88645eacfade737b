#include "nsqn/dense_bfgs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "nsqn/curvature.hpp"
#include "nsqn/errors.hpp"

namespace nsqn {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const Eigen::VectorXd> as_eigen(const ParamVector& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

DenseHessianApprox DenseHessianApprox::identity(std::size_t d) {
    DenseHessianApprox h(d);
    for (std::size_t i = 0; i < d; ++i) h(i, i) = 1.0;
    return h;
}

DenseHessianApprox DenseHessianApprox::diagonal(const ParamVector& diag) {
    DenseHessianApprox h(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) h(i, i) = diag[i];
    return h;
}

ParamVector DenseHessianApprox::apply(const ParamVector& x) const {
    if (x.size() != d_) throw DimensionError("DenseHessianApprox::apply: length mismatch");
    ParamVector out(d_);
    for (std::size_t i = 0; i < d_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d_; ++j) acc += m_[i * d_ + j] * x[j];
        out[i] = acc;
    }
    return out;
}

double DenseHessianApprox::asymmetry() const noexcept {
    double worst = 0.0;
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = i + 1; j < d_; ++j) worst = std::max(worst, std::abs(m_[i * d_ + j] - m_[j * d_ + i]));
    return worst;
}

bool DenseHessianApprox::is_positive_definite() const {
    const auto n = static_cast<Eigen::Index>(d_);
    const Eigen::Map<const Matrix> m(m_.data(), n, n);
    const Matrix sym = 0.5 * (m + m.transpose());
    const Eigen::LLT<Matrix> llt(sym);
    return llt.info() == Eigen::Success;
}

void DenseHessianApprox::absorb(const ParamVector& s, const ParamVector& y) {
    require_same_length(s, y, "DenseHessianApprox::absorb");
    if (s.size() != d_) throw DimensionError("DenseHessianApprox::absorb: pair length differs from H");
    const double ys = dot(y, s);
    if (!(ys > 0.0)) throw CurvatureError("DenseHessianApprox::absorb: sᵀy must be > 0");
    const double rho = 1.0 / ys;
    const ParamVector hy = apply(y);
    const double c = rho * rho * dot(y, hy) + rho;
    for (std::size_t i = 0; i < d_; ++i) {
        double* row = m_.data() + i * d_;
        for (std::size_t j = 0; j < d_; ++j) row[j] += c * s[i] * s[j] - rho * (s[i] * hy[j] + hy[i] * s[j]);
    }
}

DenseHessianApprox dense_bfgs_update(const DenseHessianApprox& H, const ParamVector& s, const ParamVector& y) {
    require_same_length(s, y, "dense_bfgs_update");
    if (s.size() != H.dim()) throw DimensionError("dense_bfgs_update: pair length differs from H");
    const double ys = dot(y, s);
    if (!(ys > 0.0)) throw CurvatureError("dense_bfgs_update: sᵀy must be > 0");

    const auto n = static_cast<Eigen::Index>(H.dim());
    const auto se = as_eigen(s);
    const auto ye = as_eigen(y);
    const Eigen::Map<const Matrix> h(H.data().data(), n, n);

    const Matrix left = Matrix::Identity(n, n) - (se * ye.transpose()) / ys;
    const Matrix right = Matrix::Identity(n, n) - (ye * se.transpose()) / ys;
    const Matrix updated = left * h * right + (se * se.transpose()) / ys;

    DenseHessianApprox out = DenseHessianApprox::identity(H.dim());
    for (std::size_t i = 0; i < H.dim(); ++i)
        for (std::size_t j = 0; j < H.dim(); ++j)
            out(i, j) = updated(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

ParamVector dense_direction(const ParamVector& grad, const std::vector<std::pair<ParamVector, ParamVector>>& pairs,
                            const ParamVector& h0) {
    DenseHessianApprox H = DenseHessianApprox::diagonal(h0);
    for (const auto& [s, y] : pairs) H = dense_bfgs_update(H, s, y);
    return scaled(-1.0, H.apply(grad));
}

NaqState NaqState::initial(ParamVector w0) {
    const std::size_t d = w0.size();
    return NaqState{std::move(w0), ParamVector(d), DenseHessianApprox::identity(d)};
}

FullBatchReport naq_full_batch_step(NaqState& st, double mu, double alpha, Objective& objective, double eps_curv) {
    FullBatchReport report;
    const ParamVector look = axpy(mu, st.v, st.w);
    LossGrad at_look = objective.loss_and_grad(look);
    report.loss = at_look.loss;

    const ParamVector g = scaled(-1.0, st.H.apply(at_look.grad));
    scale_inplace(mu, st.v);
    axpy_inplace(alpha, g, st.v);
    axpy_inplace(1.0, st.v, st.w);

    const LossGrad at_new = objective.loss_and_grad(st.w);
    report.gradient_calls = 2;
    if (!all_finite(st.w) || !std::isfinite(at_new.loss)) throw NumericError("naq: non-finite iterate or loss");

    const ParamVector s = difference(st.w, look);
    const ParamVector y = difference(at_new.grad, at_look.grad);
    if (curvature_admit(s, y, eps_curv)) {
        st.H.absorb(s, y);
        report.updated = true;
    }
    report.grad = std::move(at_look.grad);
    return report;
}

BfgsState BfgsState::initial(ParamVector w0) {
    const std::size_t d = w0.size();
    return BfgsState{std::move(w0), DenseHessianApprox::identity(d), std::nullopt};
}

FullBatchReport bfgs_full_batch_step(BfgsState& st, double alpha, Objective& objective, double eps_curv) {
    FullBatchReport report;
    if (!st.cached) {
        st.cached = objective.loss_and_grad(st.w);
        ++report.gradient_calls;
    }
    LossGrad here = std::move(*st.cached);
    report.loss = here.loss;

    const ParamVector w_old = st.w;
    axpy_inplace(-alpha, st.H.apply(here.grad), st.w);
    LossGrad next = objective.loss_and_grad(st.w);
    ++report.gradient_calls;
    if (!all_finite(st.w) || !std::isfinite(next.loss)) throw NumericError("bfgs: non-finite iterate or loss");

    const ParamVector s = difference(st.w, w_old);
    const ParamVector y = difference(next.grad, here.grad);
    if (curvature_admit(s, y, eps_curv)) {
        st.H.absorb(s, y);
        report.updated = true;
    }
    report.grad = std::move(here.grad);
    st.cached = std::move(next);
    return report;
}

}  // namespace nsqn
