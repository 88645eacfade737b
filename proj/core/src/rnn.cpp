#include "nsqn/rnn.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "nsqn/errors.hpp"

namespace nsqn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using StridedMap = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;
using VectorMap = Eigen::Map<Eigen::RowVectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXd>;

struct ConstWeights {
    ConstMatrixMap w_xh, w_hh;
    ConstVectorMap b_h;
    ConstMatrixMap w_hy;
    ConstVectorMap b_y;

    ConstWeights(const double* p, const RnnSpec& s, const ParamLayout& l)
        : w_xh(p + l.w_xh, s.n_hidden, s.n_in),
          w_hh(p + l.w_hh, s.n_hidden, s.n_hidden),
          b_h(p + l.b_h, s.n_hidden),
          w_hy(p + l.w_hy, s.n_out, s.n_hidden),
          b_y(p + l.b_y, s.n_out) {}
};

struct GradWeights {
    MatrixMap w_xh, w_hh;
    VectorMap b_h;
    MatrixMap w_hy;
    VectorMap b_y;

    GradWeights(double* p, const RnnSpec& s, const ParamLayout& l)
        : w_xh(p + l.w_xh, s.n_hidden, s.n_in),
          w_hh(p + l.w_hh, s.n_hidden, s.n_hidden),
          b_h(p + l.b_h, s.n_hidden),
          w_hy(p + l.w_hy, s.n_out, s.n_hidden),
          b_y(p + l.b_y, s.n_out) {}
};

void check_inputs(const ParamVector& params, const RnnSpec& spec, const SequenceBatch& batch) {
    spec.validate();
    if (params.size() != spec.param_count()) {
        throw DimensionError("rnn: parameter vector has length " + std::to_string(params.size()) +
                             ", spec needs " + std::to_string(spec.param_count()));
    }
    batch.validate(spec);
}

bool finite_range(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void RnnSpec::validate() const {
    if (n_in == 0 || n_hidden == 0 || n_out == 0 || steps == 0) {
        throw ParameterError("RnnSpec: all dimensions must be >= 1");
    }
}

std::size_t RnnSpec::param_count() const noexcept {
    return n_in * n_hidden + n_hidden * n_hidden + n_hidden + n_hidden * n_out + n_out;
}

ParamLayout ParamLayout::of(const RnnSpec& spec) noexcept {
    ParamLayout l{};
    l.w_xh = 0;
    l.w_hh = l.w_xh + spec.n_hidden * spec.n_in;
    l.b_h = l.w_hh + spec.n_hidden * spec.n_hidden;
    l.w_hy = l.b_h + spec.n_hidden;
    l.b_y = l.w_hy + spec.n_out * spec.n_hidden;
    l.total = l.b_y + spec.n_out;
    return l;
}

void SequenceBatch::validate(const RnnSpec& spec) const {
    if (batch == 0) throw DimensionError("SequenceBatch: empty batch");
    if (steps != spec.steps || n_in != spec.n_in) {
        throw DimensionError("SequenceBatch: shape [" + std::to_string(steps) + " x " + std::to_string(n_in) +
                             "] does not match spec [" + std::to_string(spec.steps) + " x " +
                             std::to_string(spec.n_in) + "]");
    }
    if (inputs.size() != batch * steps * n_in || targets.size() != batch) {
        throw DimensionError("SequenceBatch: storage size does not match declared shape");
    }
    for (int label : targets) {
        if (label < 0 || static_cast<std::size_t>(label) >= spec.n_out) {
            throw DimensionError("SequenceBatch: label " + std::to_string(label) + " outside [0, " +
                                 std::to_string(spec.n_out) + ")");
        }
    }
}

SequenceBatch SequenceBatch::subset(std::span<const std::size_t> rows) const {
    SequenceBatch out;
    out.batch = rows.size();
    out.steps = steps;
    out.n_in = n_in;
    const std::size_t stride = steps * n_in;
    out.inputs.resize(rows.size() * stride);
    out.targets.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        if (src >= batch) throw DimensionError("SequenceBatch::subset: row index out of range");
        std::copy_n(inputs.begin() + static_cast<std::ptrdiff_t>(src * stride), stride,
                    out.inputs.begin() + static_cast<std::ptrdiff_t>(r * stride));
        out.targets[r] = targets[src];
    }
    return out;
}

ParamVector init_params(const RnnSpec& spec, SeededRng& rng, double std) {
    spec.validate();
    return sample_normal(rng, 0.0, std, spec.param_count());
}

ForwardCache forward(const ParamVector& params, const RnnSpec& spec, const SequenceBatch& batch) {
    check_inputs(params, spec, batch);
    const auto layout = ParamLayout::of(spec);
    const ConstWeights w(params.data(), spec, layout);
    const std::size_t B = batch.batch, T = spec.steps, H = spec.n_hidden, C = spec.n_out;
    const auto Bi = static_cast<Eigen::Index>(B), Hi = static_cast<Eigen::Index>(H);

    ForwardCache cache;
    cache.batch = B;
    cache.steps = T;
    cache.n_hidden = H;
    cache.n_out = C;
    cache.hidden.assign((T + 1) * B * H, 0.0);

    // Input projections for every (sample, step) at once; row b·T + t.
    const ConstMatrixMap x(batch.inputs.data(), static_cast<Eigen::Index>(B * T),
                           static_cast<Eigen::Index>(spec.n_in));
    const RowMatrix xw = x * w.w_xh.transpose();

    for (std::size_t t = 1; t <= T; ++t) {
        const ConstMatrixMap h_prev(cache.hidden.data() + (t - 1) * B * H, Bi, Hi);
        MatrixMap h(cache.hidden.data() + t * B * H, Bi, Hi);
        const ConstStridedMap z_in(xw.data() + (t - 1) * H, Bi, Hi,
                                   Eigen::OuterStride<>(static_cast<Eigen::Index>(T * H)));
        h.noalias() = h_prev * w.w_hh.transpose();
        h += z_in;
        h.rowwise() += w.b_h;
        h = h.array().tanh().matrix();
    }

    cache.logits.resize(B * C);
    cache.probabilities.resize(B * C);
    const ConstMatrixMap h_last(cache.hidden.data() + T * B * H, Bi, Hi);
    MatrixMap logits(cache.logits.data(), Bi, static_cast<Eigen::Index>(C));
    logits.noalias() = h_last * w.w_hy.transpose();
    logits.rowwise() += w.b_y;

    if (!finite_range(cache.logits)) throw NumericError("rnn forward: non-finite logits");

    for (std::size_t b = 0; b < B; ++b) {
        const double* z = cache.logits.data() + b * C;
        double* p = cache.probabilities.data() + b * C;
        const double zmax = *std::max_element(z, z + C);
        double sum = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            p[c] = std::exp(z[c] - zmax);
            sum += p[c];
        }
        for (std::size_t c = 0; c < C; ++c) p[c] /= sum;
    }
    return cache;
}

double loss_ce(const ForwardCache& cache, const SequenceBatch& batch) {
    if (cache.batch != batch.batch || batch.targets.size() != cache.batch) {
        throw DimensionError("loss_ce: cache and batch sizes differ");
    }
    double total = 0.0;
    for (std::size_t b = 0; b < cache.batch; ++b) {
        const double p = cache.probability(b, static_cast<std::size_t>(batch.targets[b]));
        total += -std::log(std::max(p, kProbabilityFloor));
    }
    return total / static_cast<double>(cache.batch);
}

double loss_mse(const ForwardCache& cache, const SequenceBatch& batch) {
    if (cache.batch != batch.batch || batch.targets.size() != cache.batch) {
        throw DimensionError("loss_mse: cache and batch sizes differ");
    }
    double total = 0.0;
    for (std::size_t b = 0; b < cache.batch; ++b) {
        for (std::size_t c = 0; c < cache.n_out; ++c) {
            const double target = static_cast<std::size_t>(batch.targets[b]) == c ? 1.0 : 0.0;
            const double diff = cache.probability(b, c) - target;
            total += diff * diff;
        }
    }
    return total / static_cast<double>(cache.batch * cache.n_out);
}

double accuracy(const ForwardCache& cache, const SequenceBatch& batch) {
    if (cache.batch != batch.batch) throw DimensionError("accuracy: cache and batch sizes differ");
    std::size_t hits = 0;
    for (std::size_t b = 0; b < cache.batch; ++b) {
        const double* p = cache.probabilities.data() + b * cache.n_out;
        const auto best = static_cast<int>(std::max_element(p, p + cache.n_out) - p);
        if (best == batch.targets[b]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(cache.batch);
}

LossGrad backward(const ParamVector& params, const RnnSpec& spec, const SequenceBatch& batch) {
    const ForwardCache cache = forward(params, spec, batch);
    const auto layout = ParamLayout::of(spec);
    const ConstWeights w(params.data(), spec, layout);
    const std::size_t B = batch.batch, T = spec.steps, H = spec.n_hidden, C = spec.n_out;
    const auto Bi = static_cast<Eigen::Index>(B), Hi = static_cast<Eigen::Index>(H);

    LossGrad out;
    out.loss = loss_ce(cache, batch);
    out.grad = ParamVector(layout.total);
    GradWeights g(out.grad.data(), spec, layout);

    // Softmax + cross-entropy: ∂E/∂logits = (p − onehot) / B.
    RowMatrix dlogits(Bi, static_cast<Eigen::Index>(C));
    const double inv_b = 1.0 / static_cast<double>(B);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t c = 0; c < C; ++c) {
            const double target = static_cast<std::size_t>(batch.targets[b]) == c ? 1.0 : 0.0;
            dlogits(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) =
                (cache.probability(b, c) - target) * inv_b;
        }
    }

    const ConstMatrixMap h_last(cache.hidden.data() + T * B * H, Bi, Hi);
    g.w_hy.noalias() = dlogits.transpose() * h_last;
    g.b_y = dlogits.colwise().sum();

    RowMatrix dh = dlogits * w.w_hy;
    // Pre-activation gradients for every (sample, step), same layout as the
    // input projections in forward(): row b·T + t.
    RowMatrix dz_all(static_cast<Eigen::Index>(B * T), Hi);
    RowMatrix dz(Bi, Hi);

    for (std::size_t t = T; t >= 1; --t) {
        const ConstMatrixMap h(cache.hidden.data() + t * B * H, Bi, Hi);
        const ConstMatrixMap h_prev(cache.hidden.data() + (t - 1) * B * H, Bi, Hi);
        dz.array() = dh.array() * (1.0 - h.array().square());
        StridedMap(dz_all.data() + (t - 1) * H, Bi, Hi, Eigen::OuterStride<>(static_cast<Eigen::Index>(T * H))) =
            dz;
        g.w_hh.noalias() += dz.transpose() * h_prev;
        g.b_h += dz.colwise().sum();
        if (t > 1) dh.noalias() = dz * w.w_hh;
    }

    const ConstMatrixMap x(batch.inputs.data(), static_cast<Eigen::Index>(B * T),
                           static_cast<Eigen::Index>(spec.n_in));
    g.w_xh.noalias() = dz_all.transpose() * x;

    if (!std::isfinite(out.loss) || !all_finite(out.grad)) {
        throw NumericError("rnn backward: non-finite loss or gradient");
    }
    return out;
}

LossGrad grad_at_shifted(const ParamVector& params, const ParamVector& v, double mu, const RnnSpec& spec,
                         const SequenceBatch& batch) {
    return backward(axpy(mu, v, params), spec, batch);
}

double grad_check(const RnnSpec& spec, const SequenceBatch& batch, SeededRng& rng,
                  const GradCheckOptions& options) {
    const ParamVector w = sample_normal(rng, 0.0, options.param_std, spec.param_count());
    const LossGrad analytic = options.gradient ? options.gradient(w, spec, batch) : backward(w, spec, batch);
    if (analytic.grad.size() != w.size()) throw DimensionError("grad_check: gradient has wrong length");

    const auto loss_at = [&](const ParamVector& p) { return loss_ce(forward(p, spec, batch), batch); };
    const double h = options.step;
    double worst = 0.0;
    ParamVector probe = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
        probe[i] = w[i] + h;
        const double up = loss_at(probe);
        probe[i] = w[i] - h;
        const double down = loss_at(probe);
        probe[i] = w[i];
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic.grad[i];
        const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a) + std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace nsqn
