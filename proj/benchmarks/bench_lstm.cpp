#include <benchmark/benchmark.h>

#include "specsense/lstm.hpp"
#include "specsense/rng.hpp"

using namespace specsense;

namespace {

FeatureSequence sequence(std::size_t T) {
  Rng rng(3);
  FeatureSequence seq(T);
  for (auto& v : seq)
    for (auto& u : v.u) u = rng.normal();
  return seq;
}

void BM_Forward(benchmark::State& state) {
  const auto net = init_network(kNumFeatures, 25, 1);
  const auto seq = sequence(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, seq));
}
BENCHMARK(BM_Forward)->Arg(8)->Arg(32)->Arg(540);

void BM_LossAndGradients(benchmark::State& state) {
  const auto net = init_network(kNumFeatures, 25, 1);
  const auto seq = sequence(static_cast<std::size_t>(state.range(0)));
  std::vector<Example> batch(64, Example{seq, Hypothesis::H1});
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradients(net, batch).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_LossAndGradients)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
