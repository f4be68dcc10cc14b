#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "specsense/features.hpp"
#include "specsense/lstm.hpp"
#include "specsense/signal.hpp"

namespace specsense {

/// declared == H1 exactly when statistic > threshold.
struct Decision {
  Hypothesis declared = Hypothesis::H0;
  double statistic = 0.0;
  double threshold = 0.0;
};

Decision decide(double statistic, double threshold) noexcept;

/// Smallest threshold such that at most a `target_pf` fraction of
/// `null_statistics` exceeds it (the empirical (1 - pf) quantile).
double empirical_threshold(std::vector<double> null_statistics, double target_pf);

/// (1 - pf) quantile of Gamma(N, noise_variance), the H0 law of the
/// energy of N circular complex Gaussian samples.
double energy_threshold(const NoiseModel& noise, std::size_t N, double target_pf);

Decision energy_detect(std::span<const cplx> frame, double threshold);

/// ((sqrt(Ns) + sqrt(ML)) / (sqrt(Ns) - sqrt(ML)))^2.
double mme_asymptotic_ratio(const SmoothingConfig& cfg);

Decision mme_detect(std::span<const cplx> frame, const SmoothingConfig& cfg, double gamma);

struct MmeCalibration {
  double threshold = 0.0;         ///< Monte-Carlo (1 - pf) quantile of the null ratio
  double asymptotic_ratio = 0.0;  ///< reported alongside
  double scale = 0.0;             ///< threshold / asymptotic_ratio
};

/// Draws `trials` noise-only frames of `frame_len` samples.
MmeCalibration calibrate_mme_threshold(const NoiseModel& noise, const SmoothingConfig& cfg,
                                       std::size_t frame_len, double target_pf, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads = 1);

Decision gof_detect(std::span<const cplx> frame, const NoiseModel& noise, double threshold);

/// Empirical (1 - pf) quantile of Z_A over `trials` noise-only frames.
double calibrate_gof_threshold(const NoiseModel& noise, std::size_t frame_len, double target_pf,
                               std::size_t trials, std::uint64_t seed, std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Gaussian Naive Bayes

struct GnbModel {
  std::array<std::array<double, kNumFeatures>, 2> mean{};
  std::array<std::array<double, kNumFeatures>, 2> var{};
  std::array<double, 2> prior{0.5, 0.5};
  double variance_smoothing = 1e-8;

  friend bool operator==(const GnbModel&, const GnbModel&) = default;
};

/// Per-class normal fits. Variances are floored at
/// variance_smoothing * max(1, largest per-feature variance of the data).
GnbModel gnb_fit(std::span<const FeatureVector> x, std::span<const Hypothesis> y,
                 double variance_smoothing = 1e-8);

Posterior gnb_predict(const GnbModel& model, const FeatureVector& x);

// ---------------------------------------------------------------------------
// One-hidden-layer perceptron

struct MlpModel {
  Eigen::MatrixXd W1;  ///< hidden x 4
  Eigen::VectorXd b1;
  Eigen::MatrixXd W2;  ///< 2 x hidden
  Eigen::Vector2d b2 = Eigen::Vector2d::Zero();

  MlpModel() = default;
  MlpModel(std::size_t input, std::size_t hidden);  ///< zero weights

  std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(W1.rows()); }
  std::size_t scalar_count() const noexcept {
    return static_cast<std::size_t>(W1.size() + b1.size() + W2.size() + b2.size());
  }
};

struct MlpTrainConfig {
  std::size_t hidden = 25;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
};

Posterior mlp_predict(const MlpModel& model, const FeatureVector& x);

struct MlpLossAndGradients {
  double loss = 0.0;
  MlpModel grad;
};

/// Mean cross-entropy and gradients over a batch.
MlpLossAndGradients mlp_loss_and_gradients(const MlpModel& model, std::span<const FeatureVector> x,
                                           std::span<const Hypothesis> y);

/// tanh hidden layer, softmax output, Adam; returns the final-epoch model.
MlpModel mlp_fit(std::span<const FeatureVector> x, std::span<const Hypothesis> y, const MlpTrainConfig& cfg);

/// Central-difference check of mlp_loss_and_gradients; max relative error.
double mlp_grad_check(std::size_t hidden, std::uint64_t seed, double eps, std::size_t batch = 5);

std::vector<double> flatten(const MlpModel& m);
void unflatten(std::span<const double> flat, MlpModel& m);

// ---------------------------------------------------------------------------
// Sequence-level scoring for per-frame classifiers

/// Mean posterior over the frames of a (normalized) sequence.
template <typename Predict>
Posterior mean_posterior(std::span<const FeatureVector> seq, Predict&& predict) {
  Posterior acc{0.0, 0.0};
  for (const auto& v : seq) {
    const Posterior p = predict(v);
    acc.h0 += p.h0;
    acc.h1 += p.h1;
  }
  const double n = static_cast<double>(seq.size());
  return {acc.h0 / n, acc.h1 / n};
}

}  // namespace specsense
