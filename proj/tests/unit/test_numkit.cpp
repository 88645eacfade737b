#include <doctest.h>

#include <cmath>

#include "nsqn/errors.hpp"
#include "nsqn/numkit.hpp"
#include "oracles.hpp"

using namespace nsqn;

TEST_CASE("dot: hand examples") {
    CHECK(dot({1.0, 0.0}, {0.0, 1.0}) == 0.0);
    CHECK(dot({1.0, 2.0}, {3.0, 4.0}) == 11.0);
    CHECK_THROWS_AS(dot({1.0}, {1.0, 2.0}), DimensionError);
}

TEST_CASE("axpy: hand examples") {
    const ParamVector y{3.0, 3.0};
    CHECK(axpy(0.0, ParamVector{5.0, -7.0}, y) == y);
    CHECK(axpy(1.0, ParamVector{1.0, 1.0}, ParamVector{0.0, 0.0}) == ParamVector{1.0, 1.0});
    CHECK(axpy(-2.0, ParamVector{1.0, 0.0}, y) == ParamVector{1.0, 3.0});
    CHECK_THROWS_AS(axpy(1.0, ParamVector{1.0}, y), DimensionError);
}

TEST_CASE("l2_norm: hand examples") {
    CHECK(l2_norm({3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(l2_norm(ParamVector(7)) == 0.0);
    CHECK(l2_norm({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(l2_norm({1e200, 1e200}) == doctest::Approx(std::sqrt(2.0) * 1e200));
}

TEST_CASE("dot/axpy/l2_norm agree with scalar loops on random inputs") {
    SeededRng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + rng.below(200);
        const ParamVector a = sample_normal(rng, 0.0, 1.0, d);
        const ParamVector b = sample_normal(rng, 0.0, 1.0, d);
        const double c = rng.normal();

        double ref_dot = 0.0, ref_sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            ref_dot += a[i] * b[i];
            ref_sq += a[i] * a[i];
        }
        CHECK(std::abs(dot(a, b) - ref_dot) <= 1e-12 * std::max(1.0, std::abs(ref_dot)));
        CHECK(oracle::rel_err(l2_norm(a), std::sqrt(ref_sq)) < 1e-12);

        const ParamVector r = axpy(c, a, b);
        for (std::size_t i = 0; i < d; ++i) CHECK(r[i] == doctest::Approx(b[i] + c * a[i]).epsilon(1e-12));

        // Homogeneity: ‖c·x‖ = |c|·‖x‖.
        CHECK(oracle::rel_err(l2_norm(scaled(c, a)), std::abs(c) * l2_norm(a)) < 1e-12);
    }
}

TEST_CASE("sample_normal: degenerate std, errors, determinism") {
    SeededRng rng(3);
    const ParamVector v = sample_normal(rng, 2.5, 0.0, 16);
    for (double x : v) CHECK(x == 2.5);
    CHECK_THROWS_AS(sample_normal(rng, 0.0, -1.0, 4), ParameterError);
    CHECK_THROWS_AS(sample_normal(rng, 0.0, 1.0, 0), ParameterError);

    SeededRng a(99), b(99);
    CHECK(sample_normal(a, 0.0, 1.0, 1000) == sample_normal(b, 0.0, 1.0, 1000));
}

TEST_CASE("sample_normal: moments at n = 1e5") {
    SeededRng rng(2024);
    const std::size_t n = 100000;
    const ParamVector v = sample_normal(rng, 0.0, 0.01, n);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(n - 1));
    CHECK(std::abs(mean) < 0.001);
    CHECK(std::abs(sd - 0.01) < 0.05 * 0.01);
}

TEST_CASE("SeededRng: derived streams are reproducible and distinct") {
    const SeededRng master(5);
    SeededRng x1 = master.derive("init"), x2 = master.derive("init"), y = master.derive("shuffle");
    const auto a = x1.next_u64(), b = x2.next_u64(), c = y.next_u64();
    CHECK(a == b);
    CHECK(a != c);

    // Deriving does not depend on how far the parent stream has advanced.
    SeededRng used(5);
    for (int i = 0; i < 10; ++i) used.next_u64();
    CHECK(used.derive("init").next_u64() == a);
}

TEST_CASE("SeededRng::below stays in range and covers it") {
    SeededRng rng(8);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++seen[v];
    }
    for (int count : seen) CHECK(count > 800);
    CHECK_THROWS_AS(rng.below(0), ParameterError);
}
