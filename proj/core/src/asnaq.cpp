#include "nsqn/asnaq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsqn/errors.hpp"

namespace nsqn {

namespace {

std::string at_iteration(std::uint64_t k) { return " at iteration " + std::to_string(k); }

LossGrad checked_gradient(Objective& objective, const ParamVector& w, std::uint64_t k) {
    LossGrad out;
    try {
        out = objective.loss_and_grad(w);
    } catch (const NumericError& e) {
        throw NumericError(e.what() + at_iteration(k), k);
    }
    if (!std::isfinite(out.loss) || !all_finite(out.grad)) {
        throw NumericError("non-finite loss or gradient" + at_iteration(k), k);
    }
    return out;
}

double checked_loss(Objective& objective, const ParamVector& w, std::uint64_t k) {
    double loss;
    try {
        loss = objective.loss(w);
    } catch (const NumericError& e) {
        throw NumericError(e.what() + at_iteration(k), k);
    }
    if (!std::isfinite(loss)) throw NumericError("non-finite loss" + at_iteration(k), k);
    return loss;
}

void require_finite_iterate(const AsnaqState& st) {
    if (!all_finite(st.w) || !all_finite(st.v)) {
        throw NumericError("non-finite iterate" + at_iteration(st.k), st.k);
    }
}

bool closes_window(const AsnaqState& st, const Hyperparams& hp) { return (st.k + 1) % hp.L == 0; }

// Aggregation / error-control / pair-storage cycle shared by aSNAQ and adaQN.
void aggregation_cycle(AsnaqState& st, const Hyperparams& hp, Objective& objective, bool adapt_momentum,
                       StepReport& report) {
    report.aggregated = true;
    const double inv_l = 1.0 / static_cast<double>(hp.L);
    ParamVector w_n = scaled(inv_l, st.w_s);
    ParamVector v_n = scaled(inv_l, st.v_s);
    st.w_s.zero();
    st.v_s.zero();

    if (st.t > 0) {
        report.error_control_evaluated = true;
        const double e_new = checked_loss(objective, w_n, st.k);
        const double e_old = checked_loss(objective, st.w_o, st.k);
        if (e_new > hp.gamma * e_old) {
            st.curvature.clear();
            st.fim.clear();
            st.w = st.w_o;
            st.v = st.v_o;
            if (adapt_momentum) st.mu = std::max(st.mu / hp.phi, hp.mu_min);
            ++st.resets;
            report.reset_triggered = true;
            return;
        }
        ParamVector s = difference(w_n, st.w_o);
        ParamVector y = fim_y(st.fim, s);
        if (adapt_momentum) st.mu = std::min(st.mu * hp.phi, hp.mu_max);
        report.pair_stored = st.curvature.try_push(std::move(s), std::move(y), hp.eps_curv);
    }

    st.w_o = std::move(w_n);
    st.v_o = std::move(v_n);
    ++st.t;
}

void finish_report(const AsnaqState& st, StepReport& report) {
    report.mu_after = st.mu;
    report.n_pairs = st.curvature.size();
    report.n_fim = st.fim.size();
}

}  // namespace

AsnaqState AsnaqState::initial(ParamVector w0, const Hyperparams& hp) {
    hp.validate();
    const std::size_t d = w0.size();
    AsnaqState st{
        .w = w0,
        .v = ParamVector(d),
        .w_o = w0,
        .v_o = ParamVector(d),
        .w_s = ParamVector(d),
        .v_s = ParamVector(d),
        .mu = hp.mu_min,
        .t = 0,
        .k = 0,
        .resets = 0,
        .curvature = CurvatureBuffer(hp.m_L),
        .fim = FimBuffer(hp.m_F),
        .accum = AccumGradSquares(d),
    };
    return st;
}

StepReport asnaq_step(AsnaqState& st, const Hyperparams& hp, Objective& objective) {
    StepReport report;

    // Nesterov gradient at the look-ahead point.
    const LossGrad look = checked_gradient(objective, axpy(st.mu, st.v, st.w), st.k);
    report.loss = look.loss;
    st.accum.add(look.grad);

    ParamVector g = two_loop_direction(look.grad, st.curvature, h0_diag(st.accum, hp.eps_h0));
    report.descent_dot = dot(g, look.grad);
    report.direction_norm_pre = l2_norm(g);
    if (report.direction_norm_pre > 0.0) scale_inplace(1.0 / report.direction_norm_pre, g);

    // The window sums take the pre-update iterate and velocity.
    axpy_inplace(1.0, st.w, st.w_s);
    axpy_inplace(1.0, st.v, st.v_s);

    scale_inplace(st.mu, st.v);
    axpy_inplace(hp.alpha, g, st.v);
    axpy_inplace(1.0, st.v, st.w);
    require_finite_iterate(st);

    st.fim.push(checked_gradient(objective, st.w, st.k).grad);

    if (closes_window(st, hp)) aggregation_cycle(st, hp, objective, /*adapt_momentum=*/true, report);

    ++st.k;
    finish_report(st, report);
    return report;
}

StepReport adaqn_step(AsnaqState& st, const Hyperparams& hp, Objective& objective) {
    StepReport report;

    LossGrad here = checked_gradient(objective, st.w, st.k);
    report.loss = here.loss;
    st.accum.add(here.grad);

    const ParamVector g = two_loop_direction(here.grad, st.curvature, h0_diag(st.accum, hp.eps_h0));
    report.descent_dot = dot(g, here.grad);
    report.direction_norm_pre = l2_norm(g);

    axpy_inplace(1.0, st.w, st.w_s);
    axpy_inplace(hp.alpha, g, st.w);
    require_finite_iterate(st);

    st.fim.push(std::move(here.grad));

    if (closes_window(st, hp)) aggregation_cycle(st, hp, objective, /*adapt_momentum=*/false, report);

    ++st.k;
    finish_report(st, report);
    return report;
}

}  // namespace nsqn
