#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace nsqn {

/// Flat weight vector of a model; every optimizer exchanges these.
/// The length is fixed at construction.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
    ParamVector(std::initializer_list<double> init) : values_(init) {}
    explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    std::span<double> span() noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Sets every entry to zero, keeping the length.
    void zero() noexcept;

    bool operator==(const ParamVector&) const = default;

private:
    std::vector<double> values_;
};

/// Σ aᵢbᵢ. Throws DimensionError on length mismatch.
double dot(const ParamVector& a, const ParamVector& b);

/// Returns y + c·x.
ParamVector axpy(double c, const ParamVector& x, const ParamVector& y);

/// y ← y + c·x.
void axpy_inplace(double c, const ParamVector& x, ParamVector& y);

/// Returns c·x.
ParamVector scaled(double c, const ParamVector& x);

void scale_inplace(double c, ParamVector& x) noexcept;

/// Returns a − b.
ParamVector difference(const ParamVector& a, const ParamVector& b);

double l2_norm(const ParamVector& x) noexcept;

bool all_finite(const ParamVector& x) noexcept;

void require_same_length(const ParamVector& a, const ParamVector& b, std::string_view what);

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; uniform and normal transforms are
/// implemented here so a seed reproduces bit-exactly on any toolchain.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Independent generator for a named sub-stream, e.g. "init" or "shuffle".
    /// Depends only on (seed, stream), never on how much of this stream was used.
    SeededRng derive(std::string_view stream) const;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal draw (Marsaglia polar method).
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

/// n i.i.d. N(mean, std²) draws. Throws ParameterError if std < 0 or n == 0.
ParamVector sample_normal(SeededRng& rng, double mean, double std, std::size_t n);

/// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace nsqn
