#include "nsqn/cost_model.hpp"

#include <numeric>

#include "nsqn/errors.hpp"

namespace nsqn {

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::Bfgs: return "BFGS";
        case Algorithm::Naq: return "NAQ";
        case Algorithm::Adaqn: return "adaQN";
        case Algorithm::Asnaq: return "aSNAQ";
    }
    return "?";
}

std::string ExactCount::to_string() const {
    const std::int64_t whole = num / den;
    const std::int64_t rem = num % den;
    std::string out = std::to_string(whole);
    if (rem != 0) out += " + " + std::to_string(rem) + "/" + std::to_string(den);
    return out;
}

namespace {

void validate(const CostModelInput& in) {
    if (in.n <= 0 || in.b <= 0 || in.d <= 0 || in.m_L <= 0 || in.m_F <= 0 || in.L <= 0 || in.zeta < 0) {
        throw ParameterError("cost_model: sizes must be positive (zeta >= 0)");
    }
}

ExactCount reduced(std::int64_t num, std::int64_t den) {
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

}  // namespace

ExactCount cost_model(const CostModelInput& in) {
    validate(in);
    const std::int64_t n = in.n, b = in.b, d = in.d;
    switch (in.algorithm) {
        case Algorithm::Bfgs: return {n * d + d * d + in.zeta * n * d, 1};
        case Algorithm::Naq: return {2 * n * d + d * d + in.zeta * n * d, 1};
        case Algorithm::Adaqn: {
            const std::int64_t whole = b * d + (4 * in.m_L + in.m_F + 2) * d;
            return reduced(whole * in.L + (b + 4) * d, in.L);
        }
        case Algorithm::Asnaq: {
            const std::int64_t whole = 2 * b * d + (4 * in.m_L + in.m_F + 3) * d;
            return reduced(whole * in.L + (b + 4) * d, in.L);
        }
    }
    return {};
}

std::int64_t storage_cost(const CostModelInput& in) {
    validate(in);
    switch (in.algorithm) {
        case Algorithm::Bfgs:
        case Algorithm::Naq: return in.d * in.d;
        case Algorithm::Adaqn:
        case Algorithm::Asnaq: return (2 * in.m_L + in.m_F) * in.d;
    }
    return 0;
}

}  // namespace nsqn
