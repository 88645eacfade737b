#include "nsqn/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsqn/errors.hpp"

namespace nsqn {

void ParamVector::zero() noexcept { std::fill(values_.begin(), values_.end(), 0.0); }

void require_same_length(const ParamVector& a, const ParamVector& b, std::string_view what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    }
}

double dot(const ParamVector& a, const ParamVector& b) {
    require_same_length(a, b, "dot");
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0, n = a.size(); i < n; ++i) acc += pa[i] * pb[i];
    return acc;
}

ParamVector axpy(double c, const ParamVector& x, const ParamVector& y) {
    ParamVector out = y;
    axpy_inplace(c, x, out);
    return out;
}

void axpy_inplace(double c, const ParamVector& x, ParamVector& y) {
    require_same_length(x, y, "axpy");
    const double* px = x.data();
    double* py = y.data();
    for (std::size_t i = 0, n = x.size(); i < n; ++i) py[i] += c * px[i];
}

ParamVector scaled(double c, const ParamVector& x) {
    ParamVector out = x;
    scale_inplace(c, out);
    return out;
}

void scale_inplace(double c, ParamVector& x) noexcept {
    for (double& v : x) v *= c;
}

ParamVector difference(const ParamVector& a, const ParamVector& b) {
    require_same_length(a, b, "difference");
    ParamVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double l2_norm(const ParamVector& x) noexcept {
    // Scaled accumulation keeps huge or tiny entries from overflowing/underflowing.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double acc = 0.0;
    for (double v : x) {
        const double r = v / scale;
        acc += r * r;
    }
    return scale * std::sqrt(acc);
}

bool all_finite(const ParamVector& x) noexcept {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

SeededRng SeededRng::derive(std::string_view stream) const {
    // FNV-1a over the stream name.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : stream) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return SeededRng(mix64(seed_ ^ mix64(h)));
}

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::below(std::uint64_t n) {
    if (n == 0) throw ParameterError("SeededRng::below: n must be positive");
    // Rejection sampling on the largest multiple of n.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double SeededRng::normal() {
    if (spare_normal_) {
        const double v = *spare_normal_;
        spare_normal_.reset();
        return v;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    return u * f;
}

ParamVector sample_normal(SeededRng& rng, double mean, double std, std::size_t n) {
    if (!(std >= 0.0)) throw ParameterError("sample_normal: std must be >= 0");
    if (n == 0) throw ParameterError("sample_normal: n must be >= 1");
    ParamVector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = mean + std * rng.normal();
    return out;
}

}  // namespace nsqn
