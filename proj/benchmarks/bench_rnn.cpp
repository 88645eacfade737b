#include <benchmark/benchmark.h>

#include "nsqn/datasets.hpp"
#include "nsqn/rnn.hpp"

using namespace nsqn;

namespace {

// Counting-task shape: 24 hidden units, T = 20, batch 50.
void BM_BackwardCounting(benchmark::State& state) {
    SeededRng rng(3);
    const SequenceDataset data = gen_counting(50, 20, rng);
    const RnnSpec spec{1, 24, 21, 20};
    const ParamVector w = init_params(spec, rng);
    for (auto _ : state) benchmark::DoNotOptimize(backward(w, spec, data.samples));
}
BENCHMARK(BM_BackwardCounting)->Unit(benchmark::kMicrosecond);

// Row-by-row MNIST shape with random inputs: 28 inputs, 100 hidden, T = 28.
void BM_BackwardRows(benchmark::State& state) {
    SeededRng rng(4);
    const auto b = static_cast<std::size_t>(state.range(0));
    const RnnSpec spec{28, 100, 10, 28};
    SequenceBatch batch;
    batch.batch = b;
    batch.steps = 28;
    batch.n_in = 28;
    batch.inputs = sample_normal(rng, 0.5, 0.3, b * 28 * 28).values();
    for (std::size_t i = 0; i < b; ++i) batch.targets.push_back(static_cast<int>(rng.below(10)));
    const ParamVector w = init_params(spec, rng);
    for (auto _ : state) benchmark::DoNotOptimize(backward(w, spec, batch));
}
BENCHMARK(BM_BackwardRows)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
