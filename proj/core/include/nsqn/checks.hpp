#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsqn/cost_model.hpp"
#include "nsqn/rnn.hpp"

namespace nsqn {

struct GradCheckEntry {
    RnnSpec spec;
    std::size_t batch = 0;
    double max_rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double limit = 1e-4;
    bool passed() const noexcept;
    std::string to_text() const;
};

/// Finite-difference check of backward() on spec(2, 5, 3, T) for
/// T ∈ {1, 5, 20, 50}, batch 3. `corrupt_gradient` perturbs one component
/// of the analytic gradient so the check must fail.
GradCheckReport run_grad_check(std::uint64_t seed, bool corrupt_gradient = false);

struct OracleCheckReport {
    std::size_t trials = 0;
    double two_loop_max_dev = 0.0;  ///< relative ‖·‖₂ deviation from the dense BFGS oracle
    double fim_max_dev = 0.0;       ///< deviation from the explicit outer-product sum
    double secant_max_dev = 0.0;    ///< ‖H'y − s‖∞ / max(1, ‖s‖∞)
    bool empty_buffer_exact = false;
    bool worked_example_ok = false;
    double limit = 1e-9;

    bool passed() const noexcept;
    std::string to_text() const;
};

/// Randomized equivalence suites: two-loop vs dense BFGS (d ≤ 10, ≤ 5 pairs,
/// random positive h0), fim_y vs (1/|F|)Σ gᵢgᵢᵀ s (d ≤ 20, |F| ≤ 10), and
/// the secant condition of the dense update; plus the fixed cases.
OracleCheckReport run_oracle_check(std::uint64_t seed, std::size_t trials = 100);

struct CostRow {
    Algorithm algorithm;
    ExactCount compute;
    std::int64_t storage;
};

std::vector<CostRow> cost_table(const CostModelInput& shape);
std::string format_cost_table(const CostModelInput& shape, const std::vector<CostRow>& rows);

}  // namespace nsqn
