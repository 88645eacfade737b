#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace nsqn {

enum class Algorithm { Bfgs, Naq, Adaqn, Asnaq };

std::string_view to_string(Algorithm a) noexcept;

struct CostModelInput {
    Algorithm algorithm = Algorithm::Asnaq;
    std::int64_t n = 1;     ///< full training-set size
    std::int64_t b = 1;     ///< mini-batch size
    std::int64_t d = 1;     ///< parameter count
    std::int64_t m_L = 10;
    std::int64_t m_F = 100;
    std::int64_t L = 5;
    std::int64_t zeta = 1;  ///< line-search evaluations
};

/// Exact non-negative rational num/den, reduced. The (b+4)d/L term is not
/// always an integer.
struct ExactCount {
    std::int64_t num = 0;
    std::int64_t den = 1;

    bool is_integer() const noexcept { return den == 1; }
    /// "425400" or "12345 + 2/5".
    std::string to_string() const;

    bool operator==(const ExactCount&) const = default;
};

/// Per-iteration compute cost:
///   BFGS   nd + d² + ζnd
///   NAQ    2nd + d² + ζnd
///   adaQN  bd + (4m_L + m_F + 2)d + (b+4)d/L
///   aSNAQ  2bd + (4m_L + m_F + 3)d + (b+4)d/L
/// Throws ParameterError unless every size is positive.
ExactCount cost_model(const CostModelInput& in);

/// d² for BFGS/NAQ, (2m_L + m_F)d for adaQN/aSNAQ.
std::int64_t storage_cost(const CostModelInput& in);

}  // namespace nsqn
