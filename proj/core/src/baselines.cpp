#include "specsense/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsense/error.hpp"
#include "specsense/parallel.hpp"
#include "specsense/rng.hpp"
#include "specsense/special.hpp"

namespace specsense {

Decision decide(double statistic, double threshold) noexcept {
  return {statistic > threshold ? Hypothesis::H1 : Hypothesis::H0, statistic, threshold};
}

double empirical_threshold(std::vector<double> null_statistics, double target_pf) {
  require(!null_statistics.empty(), "empirical_threshold: no null statistics");
  require(target_pf > 0.0 && target_pf < 1.0, "empirical_threshold: target_pf must be in (0, 1)");
  std::sort(null_statistics.begin(), null_statistics.end());
  const double n = static_cast<double>(null_statistics.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - target_pf) * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, null_statistics.size());
  return null_statistics[k - 1];
}

double energy_threshold(const NoiseModel& noise, std::size_t N, double target_pf) {
  require(target_pf > 0.0 && target_pf < 1.0, "energy_threshold: target_pf must be in (0, 1)");
  require(N >= 1, "energy_threshold: N must be >= 1");
  // E / sigma^2 ~ Gamma(N, 1); P(E > t) = Q(N, t / sigma^2).
  return noise.variance * gamma_q_inverse(static_cast<double>(N), target_pf);
}

Decision energy_detect(std::span<const cplx> frame, double threshold) {
  return decide(energy(frame), threshold);
}

double mme_asymptotic_ratio(const SmoothingConfig& cfg) {
  const auto [hi, lo] = mme_asymptotic_bounds(NoiseModel(1.0), cfg);
  return hi / lo;
}

Decision mme_detect(std::span<const cplx> frame, const SmoothingConfig& cfg, double gamma) {
  return decide(mme_ratio(frame, cfg), gamma);
}

MmeCalibration calibrate_mme_threshold(const NoiseModel& noise, const SmoothingConfig& cfg,
                                       std::size_t frame_len, double target_pf, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads) {
  require(trials >= 1, "calibrate_mme_threshold: trials must be >= 1");
  std::vector<double> stats(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    const ComplexSignal w = synth_awgn(noise.variance, frame_len, derive_seed(seed, k, StreamRole::Threshold));
    stats[k] = mme_ratio(w.samples(), cfg);
  });
  MmeCalibration out;
  out.threshold = empirical_threshold(std::move(stats), target_pf);
  out.asymptotic_ratio = mme_asymptotic_ratio(cfg);
  out.scale = out.threshold / out.asymptotic_ratio;
  return out;
}

Decision gof_detect(std::span<const cplx> frame, const NoiseModel& noise, double threshold) {
  return decide(gof_za(frame, noise), threshold);
}

double calibrate_gof_threshold(const NoiseModel& noise, std::size_t frame_len, double target_pf,
                               std::size_t trials, std::uint64_t seed, std::size_t threads) {
  require(trials >= 1, "calibrate_gof_threshold: trials must be >= 1");
  std::vector<double> stats(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    const ComplexSignal w = synth_awgn(noise.variance, frame_len, derive_seed(seed, k, StreamRole::Threshold));
    stats[k] = gof_za(w.samples(), noise);
  });
  return empirical_threshold(std::move(stats), target_pf);
}

}  // namespace specsense
