#include <doctest.h>

#include "nsqn/cost_model.hpp"
#include "nsqn/errors.hpp"

using namespace nsqn;

namespace {

CostModelInput shape(Algorithm a, std::int64_t n, std::int64_t b, std::int64_t d) {
    CostModelInput in;
    in.algorithm = a;
    in.n = n;
    in.b = b;
    in.d = d;
    return in;
}

}  // namespace

TEST_CASE("cost model: hand-evaluated values") {
    // aSNAQ: 2·128·1000 + (40+100+3)·1000 + 132·1000/5
    CHECK(cost_model(shape(Algorithm::Asnaq, 60000, 128, 1000)) == ExactCount{425400, 1});
    // adaQN: 128·1000 + 142·1000 + 26400
    CHECK(cost_model(shape(Algorithm::Adaqn, 60000, 128, 1000)) == ExactCount{296400, 1});
    // BFGS with ζ=1: 2nd + d²
    CHECK(cost_model(shape(Algorithm::Bfgs, 100, 10, 10)) == ExactCount{2100, 1});
    // NAQ with ζ=1: 3nd + d²
    CHECK(cost_model(shape(Algorithm::Naq, 100, 10, 10)) == ExactCount{3100, 1});
}

TEST_CASE("cost model: non-integer (b+4)d/L term stays exact") {
    CostModelInput in = shape(Algorithm::Adaqn, 10, 1, 1);
    in.m_L = 1;
    in.m_F = 1;
    in.L = 3;
    // 1 + 7 + 5/3
    const ExactCount c = cost_model(in);
    CHECK(c == ExactCount{29, 3});
    CHECK_FALSE(c.is_integer());
    CHECK(c.to_string() == "9 + 2/3");
}

TEST_CASE("aSNAQ minus adaQN is bd + d") {
    for (std::int64_t b : {1, 50, 128})
        for (std::int64_t d : {7, 1000}) {
            const ExactCount a = cost_model(shape(Algorithm::Asnaq, 1000, b, d));
            const ExactCount q = cost_model(shape(Algorithm::Adaqn, 1000, b, d));
            REQUIRE(a.den == q.den);
            CHECK(a.num - q.num == (b * d + d) * a.den);
        }
}

TEST_CASE("storage cost") {
    CHECK(storage_cost(shape(Algorithm::Bfgs, 1, 1, 1000)) == 1000000);
    CHECK(storage_cost(shape(Algorithm::Naq, 1, 1, 1000)) == 1000000);
    CHECK(storage_cost(shape(Algorithm::Asnaq, 1, 1, 1000)) == 120000);
    CHECK(storage_cost(shape(Algorithm::Adaqn, 1, 1, 1000)) == 120000);
}

TEST_CASE("cost model rejects non-positive sizes") {
    CHECK_THROWS_AS(cost_model(shape(Algorithm::Asnaq, 1, 0, 10)), ParameterError);
    CHECK_THROWS_AS(cost_model(shape(Algorithm::Bfgs, 1, 1, -3)), ParameterError);
}
