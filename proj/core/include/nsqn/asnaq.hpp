#pragma once

#include <cstdint>

#include "nsqn/curvature.hpp"
#include "nsqn/objective.hpp"

namespace nsqn {

/// Complete state of an aSNAQ (or adaQN) run.
struct AsnaqState {
    ParamVector w;    ///< iterate
    ParamVector v;    ///< velocity; stays zero under adaQN
    ParamVector w_o;  ///< last accepted aggregated iterate
    ParamVector v_o;
    ParamVector w_s;  ///< running sums over the current aggregation window
    ParamVector v_s;
    double mu = 0.0;
    std::uint64_t t = 0;  ///< completed aggregation cycles
    std::uint64_t k = 0;  ///< completed iterations
    std::uint64_t resets = 0;
    CurvatureBuffer curvature;
    FimBuffer fim;
    AccumGradSquares accum;

    /// w = w_o = w0, v = v_o = w_s = v_s = 0, mu = mu_min, counters zero.
    static AsnaqState initial(ParamVector w0, const Hyperparams& hp);
};

struct StepReport {
    double loss = 0.0;                ///< loss at the point the direction was taken
    double direction_norm_pre = 0.0;  ///< ‖g‖₂ before normalization
    double descent_dot = 0.0;         ///< gᵀ∇E at that point, before normalization
    bool aggregated = false;          ///< this step closed an aggregation window
    bool error_control_evaluated = false;
    bool reset_triggered = false;
    bool pair_stored = false;
    double mu_after = 0.0;
    std::size_t n_pairs = 0;
    std::size_t n_fim = 0;
};

/// One aSNAQ iteration: Nesterov gradient at w + μv, two-loop direction over
/// h0_diag, unit-norm normalization, momentum update, gradient at the new
/// iterate into the aFIM buffer, and every L iterations the aggregation /
/// error-control / curvature-pair / momentum-adaptation cycle.
///
/// The aggregation cycle closes on the step that completes iteration
/// k+1 ≡ 0 (mod L), so every window averages exactly L iterates.
/// Throws NumericError (carrying the iteration index) on a non-finite loss,
/// gradient or iterate.
StepReport asnaq_step(AsnaqState& state, const Hyperparams& hp, Objective& objective);

/// adaQN iteration: the same cycle without the Nesterov shift, momentum or
/// direction normalization; one gradient per iteration at w, which also
/// feeds the aFIM buffer.
StepReport adaqn_step(AsnaqState& state, const Hyperparams& hp, Objective& objective);

}  // namespace nsqn
