#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specsense/signal.hpp"

namespace specsense {

inline constexpr std::size_t kNumFeatures = 4;

/// One detection event's statistics: u1 energy, u2 log-likelihood ratio,
/// u3 goodness-of-fit Z_A, u4 max/min eigenvalue ratio.
struct FeatureVector {
  std::array<double, kNumFeatures> u{};

  double energy() const noexcept { return u[0]; }
  double llr() const noexcept { return u[1]; }
  double gof() const noexcept { return u[2]; }
  double mme() const noexcept { return u[3]; }

  /// Raw (unnormalized) statistics satisfy u1 >= 0, u4 >= 1 and are finite.
  bool is_valid_raw() const noexcept;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

using FeatureSequence = std::vector<FeatureVector>;

struct NoiseModel {
  double variance = 1.0;

  explicit NoiseModel(double v);
  NoiseModel() = default;
};

/// Noise variance estimated from a noise-only calibration buffer.
NoiseModel estimate_noise_model(std::span<const cplx> noise_only);

/// Covariance of the primary signal over an n-sample frame, with the
/// diagonal loading that was applied when it was estimated.
struct SignalCovariance {
  Eigen::MatrixXcd matrix;
  double shrinkage_epsilon = 0.0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

/// Sample covariance (1/K) sum s_k s_k^H of K calibration frames plus
/// eps*I with eps = rel_shrinkage * trace / n.
SignalCovariance estimate_signal_covariance(std::span<const std::vector<cplx>> frames,
                                            double rel_shrinkage = 1e-6);

/// Covariance-smoothing geometry for the max/min eigenvalue statistic.
struct SmoothingConfig {
  std::size_t L = 10;   ///< smoothing factor
  std::size_t M = 1;    ///< receivers; only 1 is supported
  std::size_t Ns = 91;  ///< stacked vectors averaged

  void validate() const;
  /// Default geometry for a frame of `frame_len` samples: Ns = N - L + 1.
  static SmoothingConfig for_frame(std::size_t frame_len, std::size_t L = 10);
};

/// Per-feature z-score parameters fitted on training data.
struct Normalizer {
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> stddev{1.0, 1.0, 1.0, 1.0};

  static constexpr double kStddevFloor = 1e-9;

  FeatureVector apply(const FeatureVector& v) const noexcept;
  FeatureSequence apply(const FeatureSequence& seq) const;

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

/// sum |y[n]|^2
double energy(std::span<const cplx> frame);

/// Gaussian log-likelihood ratio evaluated directly in matrix form:
///   -log det(I + Sigma/s2) + y^H [I/s2 - (Sigma + s2 I)^-1] y.
/// O(n^3) per call; LlrEvaluator is the factored equivalent.
double llr(std::span<const cplx> frame, const SignalCovariance& sig_cov, const NoiseModel& noise);

/// Factored LLR: Sigma = U diag(lambda) U^H, so
///   L(y) = -sum log(1 + lambda_k/s2) + sum w_k |u_k^H y|^2,
///   w_k = lambda_k / (s2 (lambda_k + s2)).
/// Components whose eigenvalue exceeds the smallest one by no more than
/// `rel_truncation * lambda_max` are folded into a single weight applied
/// to the residual energy; the induced error is bounded by
/// residual_weight_spread() * |y|^2.
class LlrEvaluator {
 public:
  LlrEvaluator(const SignalCovariance& sig_cov, const NoiseModel& noise,
               double rel_truncation = 1e-12);

  double operator()(std::span<const cplx> frame) const;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t retained_components() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  double residual_weight_spread() const noexcept { return residual_spread_; }

 private:
  std::size_t dim_;
  double log_det_term_;
  Eigen::MatrixXcd basis_;       // n x r, retained eigenvectors
  Eigen::VectorXd weights_;      // r
  double residual_weight_;
  double residual_spread_;
};

/// Z_A over order statistics that are already standardized and sorted.
double gof_za_ordered(std::span<const double> sorted_standardized);

/// Z_A of a complex frame against the known N(0, noise/2) per-component CDF.
/// Real and imaginary parts are pooled into 2N reals.
double gof_za(std::span<const cplx> frame, const NoiseModel& noise);

/// R(Ns) = (1/Ns) sum_{n=L-1}^{L-2+Ns} xhat(n) xhat(n)^H with
/// xhat(n) = [x(n), x(n-1), ..., x(n-L+1)]^T (0-based n).
Eigen::MatrixXcd smoothed_covariance(std::span<const cplx> signal, const SmoothingConfig& cfg);

/// lambda_max / lambda_min of smoothed_covariance; capped at kMmeRatioCap
/// when lambda_min < 1e-15 lambda_max.
double mme_ratio(std::span<const cplx> signal, const SmoothingConfig& cfg);
inline constexpr double kMmeRatioCap = 1e15;

/// Asymptotic (lambda_max, lambda_min) of the noise-only smoothed covariance.
std::pair<double, double> mme_asymptotic_bounds(const NoiseModel& noise, const SmoothingConfig& cfg);

/// Everything needed to turn N-sample frames into raw FeatureVectors.
class FeatureExtractor {
 public:
  FeatureExtractor(std::size_t frame_len, NoiseModel noise, SmoothingConfig smoothing,
                   const SignalCovariance& sig_cov, double llr_rel_truncation = 1e-12);

  FeatureVector frame_features(std::span<const cplx> frame) const;

  /// Splits the first frame_len*seq_len samples into seq_len frames.
  FeatureSequence extract(std::span<const cplx> received, std::size_t seq_len,
                          const Normalizer* normalizer = nullptr) const;

  std::size_t frame_len() const noexcept { return frame_len_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  const SmoothingConfig& smoothing() const noexcept { return smoothing_; }
  const LlrEvaluator& llr_evaluator() const noexcept { return llr_; }

 private:
  std::size_t frame_len_;
  NoiseModel noise_;
  SmoothingConfig smoothing_;
  LlrEvaluator llr_;
};

/// One-shot form that builds a FeatureExtractor for the call.
FeatureSequence extract_sequence(const ComplexSignal& received, std::size_t frame_len,
                                 std::size_t seq_len, const SignalCovariance& sig_cov,
                                 const NoiseModel& noise, const SmoothingConfig& smoothing,
                                 const Normalizer* normalizer = nullptr);

/// Mean and standard deviation per feature over every timestep.
Normalizer fit_normalizer(std::span<const FeatureSequence> training_sequences);

}  // namespace specsense
