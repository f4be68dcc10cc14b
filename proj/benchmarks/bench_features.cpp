#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "specsense/features.hpp"
#include "specsense/pipeline.hpp"
#include "specsense/rng.hpp"

using namespace specsense;

namespace {

std::vector<cplx> noise(std::size_t n) {
  const auto w = synth_awgn(1.0, n, 42);
  return {w.samples().begin(), w.samples().end()};
}

const FeatureExtractor& extractor(std::size_t N) {
  static std::map<std::size_t, std::unique_ptr<FeatureExtractor>> cache;
  auto& slot = cache[N];
  if (!slot) {
    FeatureConfig fc;
    fc.llr_calibration_frames = 500;
    slot = std::make_unique<FeatureExtractor>(build_feature_extractor(PrimaryConfig{}, ChannelConfig{}, fc, N, 1));
  }
  return *slot;
}

void BM_Energy(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(energy(x));
}
BENCHMARK(BM_Energy)->Arg(100)->Arg(1000);

void BM_GofZa(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gof_za(x, NoiseModel(1.0)));
}
BENCHMARK(BM_GofZa)->Arg(100)->Arg(1000);

void BM_MmeRatio(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto x = noise(N);
  const auto cfg = SmoothingConfig::for_frame(N);
  for (auto _ : state) benchmark::DoNotOptimize(mme_ratio(x, cfg));
}
BENCHMARK(BM_MmeRatio)->Arg(100)->Arg(1000);

void BM_Llr(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto& ex = extractor(N);
  const auto x = noise(N);
  for (auto _ : state) benchmark::DoNotOptimize(ex.llr_evaluator()(x));
  state.counters["components"] = static_cast<double>(ex.llr_evaluator().retained_components());
}
BENCHMARK(BM_Llr)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_FrameFeatures(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto& ex = extractor(N);
  const auto x = noise(N);
  for (auto _ : state) benchmark::DoNotOptimize(ex.frame_features(x));
}
BENCHMARK(BM_FrameFeatures)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
