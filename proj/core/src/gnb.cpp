#include <algorithm>
#include <cmath>
#include <numbers>

#include "specsense/baselines.hpp"
#include "specsense/error.hpp"

namespace specsense {

GnbModel gnb_fit(std::span<const FeatureVector> x, std::span<const Hypothesis> y, double variance_smoothing) {
  require(x.size() == y.size(), "gnb_fit: feature/label count mismatch");
  require(variance_smoothing >= 0.0, "gnb_fit: variance_smoothing must be >= 0");

  std::array<std::size_t, 2> count{};
  GnbModel m;
  m.variance_smoothing = variance_smoothing;
  m.mean = {};
  m.var = {};
  for (std::size_t k = 0; k < x.size(); ++k) {
    const int c = label_of(y[k]);
    ++count[c];
    for (std::size_t f = 0; f < kNumFeatures; ++f) m.mean[c][f] += x[k].u[f];
  }
  require(count[0] > 0 && count[1] > 0, "gnb_fit: both classes must be represented");
  for (int c = 0; c < 2; ++c) {
    for (auto& v : m.mean[c]) v /= static_cast<double>(count[c]);
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const int c = label_of(y[k]);
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      const double d = x[k].u[f] - m.mean[c][f];
      m.var[c][f] += d * d;
    }
  }

  // Largest per-feature variance over the pooled data sets the floor scale.
  std::array<double, kNumFeatures> pooled_mean{};
  for (const auto& v : x) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) pooled_mean[f] += v.u[f];
  }
  for (auto& v : pooled_mean) v /= static_cast<double>(x.size());
  double max_var = 0.0;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    double acc = 0.0;
    for (const auto& v : x) acc += (v.u[f] - pooled_mean[f]) * (v.u[f] - pooled_mean[f]);
    max_var = std::max(max_var, acc / static_cast<double>(x.size()));
  }
  const double floor = variance_smoothing * std::max(1.0, max_var);

  for (int c = 0; c < 2; ++c) {
    for (auto& v : m.var[c]) v = std::max(v / static_cast<double>(count[c]), floor);
    m.prior[c] = static_cast<double>(count[c]) / static_cast<double>(x.size());
  }
  return m;
}

Posterior gnb_predict(const GnbModel& model, const FeatureVector& x) {
  std::array<double, 2> logp{};
  for (int c = 0; c < 2; ++c) {
    double acc = std::log(model.prior[c]);
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      const double d = x.u[f] - model.mean[c][f];
      acc -= 0.5 * std::log(2.0 * std::numbers::pi * model.var[c][f]) + 0.5 * d * d / model.var[c][f];
    }
    logp[c] = acc;
  }
  const double m = std::max(logp[0], logp[1]);
  const double e0 = std::exp(logp[0] - m);
  const double e1 = std::exp(logp[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace specsense
