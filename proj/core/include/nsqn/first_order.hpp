#pragma once

#include <cstdint>

#include "nsqn/curvature.hpp"
#include "nsqn/numkit.hpp"

namespace nsqn {

struct AdamHyper {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
    bool operator==(const AdamHyper&) const = default;
};

struct AdamState {
    ParamVector m;  ///< first-moment estimate
    ParamVector v;  ///< second raw-moment estimate
    std::uint64_t step = 0;

    explicit AdamState(std::size_t d) : m(d), v(d) {}
};

/// Bias-corrected Adam: w ← w − α m̂ / (√v̂ + ε).
void adam_step(ParamVector& w, AdamState& state, const ParamVector& grad, const AdamHyper& hyper);

struct AdagradHyper {
    double alpha = 0.01;
    double eps = 1e-8;

    void validate() const;
    bool operator==(const AdagradHyper&) const = default;
};

/// Adagrad keeps the same running Σg² as the quasi-Newton h0 seed.
struct AdagradState {
    AccumGradSquares accum;

    explicit AdagradState(std::size_t d) : accum(d) {}
};

/// w ← w − α g ⊙ 1/√(Σg² + ε), with the sum including the current g.
void adagrad_step(ParamVector& w, AdagradState& state, const ParamVector& grad, const AdagradHyper& hyper);

}  // namespace nsqn
