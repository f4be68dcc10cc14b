#include "specsense/features.hpp"

#include <algorithm>
#include <cmath>

#include "specsense/error.hpp"

namespace specsense {

bool FeatureVector::is_valid_raw() const noexcept {
  for (double x : u) {
    if (!std::isfinite(x)) return false;
  }
  return u[0] >= 0.0 && u[3] >= 1.0;
}

NoiseModel::NoiseModel(double v) : variance(v) {
  require(v > 0.0 && std::isfinite(v), "NoiseModel: variance must be > 0");
}

NoiseModel estimate_noise_model(std::span<const cplx> noise_only) {
  require(!noise_only.empty(), "estimate_noise_model: empty calibration buffer");
  return NoiseModel(energy(noise_only) / static_cast<double>(noise_only.size()));
}

SignalCovariance estimate_signal_covariance(std::span<const std::vector<cplx>> frames,
                                            double rel_shrinkage) {
  require(!frames.empty(), "estimate_signal_covariance: no calibration frames");
  require(rel_shrinkage >= 0.0, "estimate_signal_covariance: shrinkage must be >= 0");
  const auto n = static_cast<Eigen::Index>(frames.front().size());
  require(n > 0, "estimate_signal_covariance: empty frame");

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& f : frames) {
    require(static_cast<Eigen::Index>(f.size()) == n,
            "estimate_signal_covariance: frames differ in length");
    Eigen::Map<const Eigen::VectorXcd> v(f.data(), n);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
  SignalCovariance out;
  out.matrix = acc.selfadjointView<Eigen::Lower>();
  out.matrix /= static_cast<double>(frames.size());
  const double eps = rel_shrinkage * out.matrix.trace().real() / static_cast<double>(n);
  out.matrix.diagonal().array() += eps;
  out.shrinkage_epsilon = eps;
  return out;
}

void SmoothingConfig::validate() const {
  require(L >= 1, "smoothing.L must be >= 1");
  require(M == 1, "smoothing.M: only single-receiver sensing (M = 1) is supported");
  require(Ns >= 1, "smoothing.Ns must be >= 1");
  require(Ns > M * L, "smoothing: Ns must exceed M*L");
}

SmoothingConfig SmoothingConfig::for_frame(std::size_t frame_len, std::size_t L) {
  require(frame_len >= L, "smoothing: frame shorter than smoothing factor");
  SmoothingConfig cfg{L, 1, frame_len - L + 1};
  cfg.validate();
  return cfg;
}

FeatureVector Normalizer::apply(const FeatureVector& v) const noexcept {
  FeatureVector out;
  for (std::size_t k = 0; k < kNumFeatures; ++k) out.u[k] = (v.u[k] - mean[k]) / stddev[k];
  return out;
}

FeatureSequence Normalizer::apply(const FeatureSequence& seq) const {
  FeatureSequence out;
  out.reserve(seq.size());
  for (const auto& v : seq) out.push_back(apply(v));
  return out;
}

double energy(std::span<const cplx> frame) {
  require(!frame.empty(), "energy: empty frame");
  double acc = 0.0;
  for (const auto& y : frame) acc += std::norm(y);
  return acc;
}

FeatureExtractor::FeatureExtractor(std::size_t frame_len, NoiseModel noise,
                                   SmoothingConfig smoothing, const SignalCovariance& sig_cov,
                                   double llr_rel_truncation)
    : frame_len_(frame_len),
      noise_(noise),
      smoothing_(smoothing),
      llr_(sig_cov, noise, llr_rel_truncation) {
  require(frame_len >= 1, "FeatureExtractor: frame_len must be >= 1");
  require(sig_cov.dim() == frame_len, "FeatureExtractor: signal covariance dimension != frame_len");
  smoothing_.validate();
  require(smoothing_.L - 1 + smoothing_.Ns <= frame_len,
          "FeatureExtractor: smoothing needs L-1+Ns <= frame_len");
}

FeatureVector FeatureExtractor::frame_features(std::span<const cplx> frame) const {
  require(frame.size() == frame_len_, "frame_features: frame length mismatch");
  FeatureVector v;
  v.u[0] = energy(frame);
  v.u[1] = llr_(frame);
  v.u[2] = gof_za(frame, noise_);
  v.u[3] = mme_ratio(frame, smoothing_);
  return v;
}

FeatureSequence FeatureExtractor::extract(std::span<const cplx> received, std::size_t seq_len,
                                          const Normalizer* normalizer) const {
  require(seq_len >= 1, "extract_sequence: seq_len must be >= 1");
  require(received.size() >= frame_len_ * seq_len,
          "extract_sequence: need frame_len*seq_len samples, got " +
              std::to_string(received.size()));
  FeatureSequence seq(seq_len);
  for (std::size_t t = 0; t < seq_len; ++t) {
    seq[t] = frame_features(received.subspan(t * frame_len_, frame_len_));
    if (normalizer != nullptr) seq[t] = normalizer->apply(seq[t]);
  }
  return seq;
}

FeatureSequence extract_sequence(const ComplexSignal& received, std::size_t frame_len,
                                 std::size_t seq_len, const SignalCovariance& sig_cov,
                                 const NoiseModel& noise, const SmoothingConfig& smoothing,
                                 const Normalizer* normalizer) {
  const FeatureExtractor fx(frame_len, noise, smoothing, sig_cov);
  return fx.extract(received.samples(), seq_len, normalizer);
}

Normalizer fit_normalizer(std::span<const FeatureSequence> training_sequences) {
  std::size_t count = 0;
  std::array<double, kNumFeatures> sum{};
  for (const auto& seq : training_sequences) {
    for (const auto& v : seq) {
      for (std::size_t k = 0; k < kNumFeatures; ++k) sum[k] += v.u[k];
      ++count;
    }
  }
  require(count >= 2, "fit_normalizer: need at least 2 feature vectors");

  Normalizer out;
  for (std::size_t k = 0; k < kNumFeatures; ++k) out.mean[k] = sum[k] / static_cast<double>(count);
  std::array<double, kNumFeatures> sq{};
  for (const auto& seq : training_sequences) {
    for (const auto& v : seq) {
      for (std::size_t k = 0; k < kNumFeatures; ++k) {
        const double d = v.u[k] - out.mean[k];
        sq[k] += d * d;
      }
    }
  }
  for (std::size_t k = 0; k < kNumFeatures; ++k) {
    out.stddev[k] = std::max(std::sqrt(sq[k] / static_cast<double>(count)), Normalizer::kStddevFloor);
  }
  return out;
}

}  // namespace specsense
