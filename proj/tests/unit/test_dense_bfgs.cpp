#include <doctest.h>

#include <cmath>

#include "nsqn/dense_bfgs.hpp"
#include "nsqn/errors.hpp"
#include "oracles.hpp"

using namespace nsqn;

namespace {

// E(w) = ½ wᵀAw − bᵀw with A = [[3, 1], [1, 2]].
struct Quad2 final : Objective {
    LossGrad loss_and_grad(const ParamVector& w) override {
        return {loss(w), ParamVector{3.0 * w[0] + w[1] - 1.0, w[0] + 2.0 * w[1] + 1.0}};
    }
    double loss(const ParamVector& w) override {
        return 0.5 * (3.0 * w[0] * w[0] + 2.0 * w[0] * w[1] + 2.0 * w[1] * w[1]) - w[0] + w[1];
    }
};

oracle::Dense to_dense(const DenseHessianApprox& h) {
    oracle::Dense m(h.dim(), std::vector<double>(h.dim()));
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = 0; j < h.dim(); ++j) m[i][j] = h(i, j);
    return m;
}

}  // namespace

TEST_CASE("dense update: worked example") {
    const DenseHessianApprox h = dense_bfgs_update(DenseHessianApprox::identity(2), {1.0, 0.0}, {2.0, 0.0});
    CHECK(h(0, 0) == doctest::Approx(0.5));
    CHECK(h(0, 1) == 0.0);
    CHECK(h(1, 1) == doctest::Approx(1.0));
    CHECK(dense_direction({1.0, 1.0}, {{ParamVector{1.0, 0.0}, ParamVector{2.0, 0.0}}}, {1.0, 1.0}) ==
          ParamVector{-0.5, -1.0});
}

TEST_CASE("dense update matches the scalar matrix oracle, secant, symmetry, PD") {
    SeededRng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + rng.below(8);
        ParamVector diag(d);
        for (auto& x : diag) x = 0.1 + rng.uniform();
        DenseHessianApprox h = DenseHessianApprox::diagonal(diag);
        DenseHessianApprox fast = h;
        oracle::Dense ref = to_dense(h);
        for (int u = 0; u < 4; ++u) {
            auto [s, y] = oracle::admissible_pair(rng, d);
            h = dense_bfgs_update(h, s, y);
            fast.absorb(s, y);
            ref = oracle::bfgs(ref, s.values(), y.values());
            const ParamVector hy = h.apply(y);
            for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(hy[i] - s[i]) < 1e-12 * std::max(1.0, std::abs(s[i])));
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                CHECK(std::abs(h(i, j) - ref[i][j]) < 1e-10 * std::max(1.0, std::abs(ref[i][j])));
                CHECK(std::abs(fast(i, j) - ref[i][j]) < 1e-9 * std::max(1.0, std::abs(ref[i][j])));
            }
        CHECK(h.asymmetry() < 1e-10);
        CHECK(h.is_positive_definite());
    }
}

TEST_CASE("dense update rejects non-positive curvature") {
    const auto h = DenseHessianApprox::identity(2);
    CHECK_THROWS_AS(dense_bfgs_update(h, {1.0, 0.0}, {-1.0, 0.0}), CurvatureError);
    CHECK_THROWS_AS(dense_bfgs_update(h, {1.0, 0.0}, {0.0, 1.0}), CurvatureError);
    auto g = h;
    CHECK_THROWS_AS(g.absorb({1.0, 0.0}, {0.0, 1.0}), CurvatureError);
}

TEST_CASE("NAQ with mu = 0 and H = I is a gradient step") {
    Quad2 q;
    NaqState st = NaqState::initial({1.0, 1.0});
    const FullBatchReport r = naq_full_batch_step(st, 0.0, 0.1, q);
    CHECK(st.w[0] == doctest::Approx(1.0 - 0.1 * 3.0));
    CHECK(st.w[1] == doctest::Approx(1.0 - 0.1 * 4.0));
    CHECK(r.gradient_calls == 2);
}

namespace {

template <class Step>
int iterations_to_converge(Step step) {
    Quad2 q;
    for (int k = 1; k <= 10000; ++k) {
        const ParamVector w = step(q);
        if (l2_norm(q.loss_and_grad(w).grad) < 1e-8) return k;
    }
    return 10001;
}

}  // namespace

TEST_CASE("NAQ converges on a 2-d quadratic in fewer iterations than BFGS") {
    const double alpha = 0.3;
    NaqState naq = NaqState::initial({2.0, -3.0});
    const int k_naq = iterations_to_converge([&](Objective& o) {
        naq_full_batch_step(naq, 0.3, alpha, o);
        return naq.w;
    });
    BfgsState bfgs = BfgsState::initial({2.0, -3.0});
    const int k_bfgs = iterations_to_converge([&](Objective& o) {
        bfgs_full_batch_step(bfgs, alpha, o);
        return bfgs.w;
    });
    INFO("naq " << k_naq << " bfgs " << k_bfgs);
    CHECK(k_bfgs <= 10000);
    CHECK(k_naq < k_bfgs);
    // Minimizer of the quadratic: A w = b.
    CHECK(naq.w[0] == doctest::Approx(0.6));
    CHECK(naq.w[1] == doctest::Approx(-0.8));
}

TEST_CASE("BFGS reuses the gradient at the new iterate") {
    Quad2 inner;
    CountingObjective q(inner);
    BfgsState st = BfgsState::initial({1.0, 1.0});
    for (int i = 0; i < 5; ++i) bfgs_full_batch_step(st, 0.5, q);
    CHECK(q.gradient_calls() == 6);
}
