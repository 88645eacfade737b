#include <benchmark/benchmark.h>

#include "nsqn/curvature.hpp"

using namespace nsqn;

namespace {

CurvatureBuffer filled_buffer(std::size_t d, std::size_t m, SeededRng& rng) {
    CurvatureBuffer buf(m);
    while (buf.size() < m) {
        const ParamVector s = sample_normal(rng, 0.0, 1.0, d);
        ParamVector y = s;
        axpy_inplace(0.1, sample_normal(rng, 0.0, 1.0, d), y);
        buf.try_push(s, y, 1e-8);
    }
    return buf;
}

void BM_TwoLoop(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    SeededRng rng(1);
    const CurvatureBuffer buf = filled_buffer(d, 10, rng);
    const ParamVector grad = sample_normal(rng, 0.0, 1.0, d);
    const ParamVector h0(d, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(two_loop_direction(grad, buf, h0));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d));
}
BENCHMARK(BM_TwoLoop)->Arg(1149)->Arg(13010)->Arg(100000);

void BM_FimY(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    SeededRng rng(2);
    FimBuffer fim(100);
    for (int i = 0; i < 100; ++i) fim.push(sample_normal(rng, 0.0, 1.0, d));
    const ParamVector s = sample_normal(rng, 0.0, 1.0, d);
    for (auto _ : state) benchmark::DoNotOptimize(fim_y(fim, s));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d));
}
BENCHMARK(BM_FimY)->Arg(1149)->Arg(13010);

}  // namespace
