#include "nsqn/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nsqn/curvature.hpp"
#include "nsqn/dense_bfgs.hpp"

namespace nsqn {

namespace {

SequenceBatch random_batch(const RnnSpec& spec, std::size_t batch, SeededRng& rng) {
    SequenceBatch b;
    b.batch = batch;
    b.steps = spec.steps;
    b.n_in = spec.n_in;
    b.inputs = sample_normal(rng, 0.0, 1.0, batch * spec.steps * spec.n_in).values();
    b.targets.resize(batch);
    for (auto& t : b.targets) t = static_cast<int>(rng.below(spec.n_out));
    return b;
}

std::size_t uniform_size(SeededRng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

ParamVector random_positive(SeededRng& rng, std::size_t d, double lo, double hi) {
    ParamVector v(d);
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
}

// y = M s for a random SPD M, so sᵀy > 0.
ParamVector spd_image(SeededRng& rng, const ParamVector& s) {
    const std::size_t d = s.size();
    const ParamVector a = sample_normal(rng, 0.0, 1.0, d * d);
    ParamVector as(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) as[i] += a[i * d + j] * s[j];
    ParamVector y(d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) y[j] += a[i * d + j] * as[i];
        y[j] += 0.5 * s[j];
    }
    return y;
}

double max_abs(const ParamVector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

bool GradCheckReport::passed() const noexcept {
    return std::all_of(entries.begin(), entries.end(), [&](const auto& e) { return e.max_rel_error < limit; });
}

std::string GradCheckReport::to_text() const {
    std::ostringstream out;
    for (const auto& e : entries) {
        out << "spec(n_in=" << e.spec.n_in << ", n_hidden=" << e.spec.n_hidden << ", n_out=" << e.spec.n_out
            << ", T=" << e.spec.steps << ") batch=" << e.batch << "  max rel error " << sci(e.max_rel_error)
            << (e.max_rel_error < limit ? "  ok" : "  FAIL") << '\n';
    }
    out << (passed() ? "grad-check passed" : "grad-check FAILED") << " (limit " << sci(limit) << ")\n";
    return out.str();
}

GradCheckReport run_grad_check(std::uint64_t seed, bool corrupt_gradient) {
    GradCheckReport report;
    SeededRng rng = SeededRng(seed).derive("grad-check");
    GradCheckOptions options;
    if (corrupt_gradient) {
        options.gradient = [](const ParamVector& w, const RnnSpec& s, const SequenceBatch& b) {
            LossGrad lg = backward(w, s, b);
            lg.grad[0] += 1e-2;
            return lg;
        };
    }
    for (std::size_t steps : {1, 5, 20, 50}) {
        const RnnSpec spec{2, 5, 3, steps};
        const std::size_t batch = 3;
        const SequenceBatch b = random_batch(spec, batch, rng);
        report.entries.push_back({spec, batch, grad_check(spec, b, rng, options)});
    }
    return report;
}

bool OracleCheckReport::passed() const noexcept {
    return two_loop_max_dev < limit && fim_max_dev < limit && secant_max_dev < limit && empty_buffer_exact &&
           worked_example_ok;
}

std::string OracleCheckReport::to_text() const {
    std::ostringstream out;
    out << "two-loop vs dense BFGS   trials=" << trials << "  max rel deviation " << sci(two_loop_max_dev) << '\n'
        << "fim_y vs outer products  trials=" << trials << "  max deviation     " << sci(fim_max_dev) << '\n'
        << "dense update secant      trials=" << trials << "  max deviation     " << sci(secant_max_dev) << '\n'
        << "empty buffer == -h0*grad  " << (empty_buffer_exact ? "exact" : "MISMATCH") << '\n'
        << "worked example (-0.5, -1) " << (worked_example_ok ? "ok" : "MISMATCH") << '\n'
        << (passed() ? "oracle-check passed" : "oracle-check FAILED") << " (limit " << sci(limit) << ")\n";
    return out.str();
}

OracleCheckReport run_oracle_check(std::uint64_t seed, std::size_t trials) {
    OracleCheckReport r;
    r.trials = trials;
    SeededRng rng = SeededRng(seed).derive("oracle-check");

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t d = uniform_size(rng, 1, 10);
        const std::size_t n_pairs = uniform_size(rng, 0, 5);
        CurvatureBuffer buf(5);
        std::vector<std::pair<ParamVector, ParamVector>> pairs;
        while (pairs.size() < n_pairs) {
            ParamVector s = sample_normal(rng, 0.0, 1.0, d);
            ParamVector y = spd_image(rng, s);
            if (!buf.try_push(s, y, 1e-8)) continue;
            pairs.emplace_back(std::move(s), std::move(y));
        }
        const ParamVector h0 = random_positive(rng, d, 0.1, 2.0);
        const ParamVector grad = sample_normal(rng, 0.0, 1.0, d);
        const ParamVector fast = two_loop_direction(grad, buf, h0);
        const ParamVector ref = dense_direction(grad, pairs, h0);
        const double dev = l2_norm(difference(fast, ref)) / std::max(l2_norm(ref), 1e-300);
        r.two_loop_max_dev = std::max(r.two_loop_max_dev, dev);
    }

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t d = uniform_size(rng, 1, 20);
        const std::size_t count = uniform_size(rng, 1, 10);
        FimBuffer fim(10);
        std::vector<double> dense(d * d, 0.0);
        for (std::size_t k = 0; k < count; ++k) {
            ParamVector g = sample_normal(rng, 0.0, 1.0, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) dense[i * d + j] += g[i] * g[j];
            fim.push(std::move(g));
        }
        const ParamVector s = sample_normal(rng, 0.0, 1.0, d);
        ParamVector ref(d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) ref[i] += dense[i * d + j] * s[j];
            ref[i] /= static_cast<double>(count);
        }
        const double dev = max_abs(difference(fim_y(fim, s), ref)) / std::max(1.0, max_abs(ref));
        r.fim_max_dev = std::max(r.fim_max_dev, dev);
    }

    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t d = uniform_size(rng, 1, 10);
        DenseHessianApprox h = DenseHessianApprox::diagonal(random_positive(rng, d, 0.1, 2.0));
        // A few warm-up updates so H is a general SPD matrix, not just diagonal.
        for (int warm = 0; warm < 3; ++warm) {
            const ParamVector s = sample_normal(rng, 0.0, 1.0, d);
            h = dense_bfgs_update(h, s, spd_image(rng, s));
        }
        const ParamVector s = sample_normal(rng, 0.0, 1.0, d);
        const ParamVector y = spd_image(rng, s);
        const DenseHessianApprox next = dense_bfgs_update(h, s, y);
        const double dev = max_abs(difference(next.apply(y), s)) / std::max(1.0, max_abs(s));
        r.secant_max_dev = std::max(r.secant_max_dev, dev);
    }

    {
        const ParamVector grad = sample_normal(rng, 0.0, 1.0, 7);
        const ParamVector h0 = random_positive(rng, 7, 0.1, 2.0);
        const ParamVector g = two_loop_direction(grad, CurvatureBuffer(3), h0);
        r.empty_buffer_exact = true;
        for (std::size_t i = 0; i < 7; ++i) r.empty_buffer_exact &= (g[i] == -(h0[i] * grad[i]));
    }
    {
        CurvatureBuffer buf(1);
        buf.try_push({1.0, 0.0}, {2.0, 0.0}, 1e-8);
        const ParamVector g = two_loop_direction({1.0, 1.0}, buf, {1.0, 1.0});
        const ParamVector ref = dense_direction({1.0, 1.0}, {{ParamVector{1.0, 0.0}, ParamVector{2.0, 0.0}}}, {1.0, 1.0});
        r.worked_example_ok = std::abs(g[0] + 0.5) < 1e-15 && std::abs(g[1] + 1.0) < 1e-15 &&
                              std::abs(ref[0] + 0.5) < 1e-15 && std::abs(ref[1] + 1.0) < 1e-15;
    }
    return r;
}

std::vector<CostRow> cost_table(const CostModelInput& shape) {
    std::vector<CostRow> rows;
    for (auto algo : {Algorithm::Bfgs, Algorithm::Naq, Algorithm::Adaqn, Algorithm::Asnaq}) {
        CostModelInput in = shape;
        in.algorithm = algo;
        rows.push_back({algo, cost_model(in), storage_cost(in)});
    }
    return rows;
}

std::string format_cost_table(const CostModelInput& s, const std::vector<CostRow>& rows) {
    std::ostringstream out;
    out << "n=" << s.n << " b=" << s.b << " d=" << s.d << " m_L=" << s.m_L << " m_F=" << s.m_F << " L=" << s.L
        << " zeta=" << s.zeta << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %24s %20s\n", "algorithm", "compute", "storage");
    out << line;
    for (const auto& row : rows) {
        std::snprintf(line, sizeof line, "%-8s %24s %20lld\n", std::string(to_string(row.algorithm)).c_str(),
                      row.compute.to_string().c_str(), static_cast<long long>(row.storage));
        out << line;
    }
    return out.str();
}

}  // namespace nsqn
