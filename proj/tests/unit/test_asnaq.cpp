#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "nsqn/asnaq.hpp"
#include "nsqn/errors.hpp"

using namespace nsqn;

namespace {

// E(w) = ½ Σ cᵢ wᵢ²
struct Quadratic final : Objective {
    ParamVector c;
    explicit Quadratic(ParamVector curv) : c(std::move(curv)) {}
    LossGrad loss_and_grad(const ParamVector& w) override {
        LossGrad out{loss(w), ParamVector(w.size())};
        for (std::size_t i = 0; i < w.size(); ++i) out.grad[i] = c[i] * w[i];
        return out;
    }
    double loss(const ParamVector& w) override {
        double e = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) e += 0.5 * c[i] * w[i] * w[i];
        return e;
    }
};

struct NanAfter final : Objective {
    int left;
    explicit NanAfter(int n) : left(n) {}
    LossGrad loss_and_grad(const ParamVector& w) override {
        const double v = left-- > 0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
        return {v, ParamVector(w.size(), v)};
    }
    double loss(const ParamVector&) override { return 1.0; }
};

// State sitting on the last iteration of a window (k+1 ≡ 0 mod L), after one
// completed cycle, with one stored pair and a few aFIM gradients.
AsnaqState primed(const Hyperparams& hp, ParamVector w, ParamVector w_o, double mu) {
    AsnaqState st = AsnaqState::initial(w, hp);
    st.w_o = std::move(w_o);
    st.mu = mu;
    st.t = 1;
    st.k = hp.L - 1;
    REQUIRE(st.curvature.try_push({1.0, 0.0}, {1.0, 0.0}, hp.eps_curv));
    st.fim.push({1.0, 1.0});
    st.fim.push({0.5, 1.0});
    return st;
}

}  // namespace

TEST_CASE("initial state") {
    const Hyperparams hp;
    const AsnaqState st = AsnaqState::initial({1.0, 2.0}, hp);
    CHECK(st.w == ParamVector{1.0, 2.0});
    CHECK(st.w_o == st.w);
    CHECK(st.v == ParamVector(2));
    CHECK(st.mu == hp.mu_min);
    CHECK(st.k == 0);
    CHECK(st.t == 0);
    CHECK(st.curvature.capacity() == hp.m_L);
    CHECK(st.fim.capacity() == hp.m_F);
    Hyperparams bad;
    bad.phi = 0.9;
    CHECK_THROWS_AS(AsnaqState::initial({1.0}, bad), ParameterError);
}

TEST_CASE("successful aggregation raises mu 0.9 -> 0.99 and stores a pair") {
    const Hyperparams hp;
    Quadratic q({1.0, 1.0});
    AsnaqState st = primed(hp, {0.5, 0.5}, {10.0, 10.0}, 0.9);
    const StepReport r = asnaq_step(st, hp, q);
    CHECK(r.aggregated);
    CHECK(r.error_control_evaluated);
    CHECK_FALSE(r.reset_triggered);
    CHECK(st.mu == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(st.mu <= hp.mu_max);
    CHECK(st.t == 2);
    CHECK(st.k == hp.L);
    // w_n = w_s / L with w_s holding only the pre-update w.
    CHECK(st.w_o == ParamVector{0.1, 0.1});
    CHECK(st.w_s == ParamVector(2));
    CHECK(st.curvature.size() == 2);
}

TEST_CASE("error control reset lowers mu 0.11 -> 0.1, clears buffers, restores w_o") {
    const Hyperparams hp;
    Quadratic q({1.0, 1.0});
    const ParamVector w_o{0.0, 0.0};
    AsnaqState st = primed(hp, {3.0, -2.0}, w_o, 0.11);
    st.v_o = {0.25, -0.5};
    const ParamVector accum_before = st.accum.values();
    const StepReport r = asnaq_step(st, hp, q);
    CHECK(r.reset_triggered);
    CHECK(st.mu == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(st.mu >= hp.mu_min);
    CHECK(st.curvature.empty());
    CHECK(st.fim.empty());
    CHECK(st.w == w_o);
    CHECK(st.v == ParamVector{0.25, -0.5});
    CHECK(st.resets == 1);
    CHECK(st.t == 1);
    CHECK(st.k == hp.L);
    // The h0 accumulator survives the reset.
    CHECK(st.accum.values() != accum_before);
    CHECK(st.accum.values()[0] > 0.0);
}

TEST_CASE("mu stays clamped at both bounds") {
    const Hyperparams hp;
    Quadratic q({1.0, 1.0});
    AsnaqState up = primed(hp, {0.5, 0.5}, {10.0, 10.0}, 0.99);
    asnaq_step(up, hp, q);
    CHECK(up.mu == 0.99);
    AsnaqState down = primed(hp, {3.0, 3.0}, {0.0, 0.0}, 0.1);
    asnaq_step(down, hp, q);
    CHECK(down.mu == 0.1);
}

TEST_CASE("mid-window steps leave mu and the curvature buffer alone") {
    const Hyperparams hp;
    Quadratic q({1.0, 4.0});
    AsnaqState st = AsnaqState::initial({1.0, 1.0}, hp);
    for (std::size_t i = 0; i + 1 < hp.L; ++i) {
        const StepReport r = asnaq_step(st, hp, q);
        CHECK_FALSE(r.aggregated);
        CHECK(st.mu == hp.mu_min);
        CHECK(st.curvature.empty());
        CHECK(st.fim.size() == i + 1);
    }
    // The first window closes without error control or a pair.
    const StepReport r = asnaq_step(st, hp, q);
    CHECK(r.aggregated);
    CHECK_FALSE(r.error_control_evaluated);
    CHECK_FALSE(r.pair_stored);
    CHECK(st.t == 1);
}

TEST_CASE("the step taken is alpha times a unit direction plus mu v") {
    Hyperparams hp;
    hp.alpha = 0.05;
    Quadratic q({1.0, 10.0, 0.1});
    AsnaqState st = AsnaqState::initial({1.0, -2.0, 3.0}, hp);
    for (int i = 0; i < 23; ++i) {
        const ParamVector v_before = st.v;
        const double mu = st.mu;
        const StepReport r = asnaq_step(st, hp, q);
        CHECK(r.descent_dot < 0.0);
        const ParamVector g = scaled(1.0 / hp.alpha, difference(st.v, scaled(mu, v_before)));
        if (!r.reset_triggered) CHECK(std::abs(l2_norm(g) - 1.0) < 1e-12);
        CHECK(st.mu >= hp.mu_min);
        CHECK(st.mu <= hp.mu_max);
    }
}

TEST_CASE("gradient and loss call accounting") {
    const Hyperparams hp;
    Quadratic inner({1.0, 2.0});
    CountingObjective counted(inner);
    AsnaqState st = AsnaqState::initial({1.0, 1.0}, hp);
    std::uint64_t cycles = 0;
    for (int i = 0; i < 40; ++i) cycles += asnaq_step(st, hp, counted).error_control_evaluated;
    CHECK(counted.gradient_calls() == 2 * 40);
    CHECK(counted.loss_calls() == 2 * cycles);
    CHECK(cycles == 40 / hp.L - 1);

    CountingObjective counted2(inner);
    AsnaqState st2 = AsnaqState::initial({1.0, 1.0}, hp);
    for (int i = 0; i < 40; ++i) adaqn_step(st2, hp, counted2);
    CHECK(counted2.gradient_calls() == 40);
    CHECK(counted2.loss_calls() == 2 * (40 / hp.L - 1));
}

TEST_CASE("adaQN keeps v at zero and mu fixed") {
    const Hyperparams hp;
    Quadratic q({1.0, 3.0});
    AsnaqState st = AsnaqState::initial({2.0, -1.0}, hp);
    for (int i = 0; i < 30; ++i) {
        const StepReport r = adaqn_step(st, hp, q);
        CHECK(r.descent_dot < 0.0);
        CHECK(st.v == ParamVector(2));
        CHECK(st.mu == hp.mu_min);
    }
    CHECK(q.loss(st.w) < q.loss({2.0, -1.0}));
}

TEST_CASE("aSNAQ decreases a convex quadratic") {
    const Hyperparams hp;
    Quadratic q({1.0, 2.0, 0.5, 3.0});
    const ParamVector w0{1.0, 1.0, -1.0, 0.5};
    AsnaqState st = AsnaqState::initial(w0, hp);
    for (int i = 0; i < 200; ++i) asnaq_step(st, hp, q);
    CHECK(q.loss(st.w) < 0.1 * q.loss(w0));
}

TEST_CASE("non-finite gradient raises NumericError with the iteration") {
    const Hyperparams hp;
    NanAfter obj(5);
    AsnaqState st = AsnaqState::initial({1.0, 1.0}, hp);
    try {
        for (int i = 0; i < 10; ++i) asnaq_step(st, hp, obj);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.iteration() == 2);
        CHECK(std::string(e.what()).find("iteration 2") != std::string::npos);
    }
}
