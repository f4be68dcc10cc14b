#include "specsense/pipeline.hpp"

#include <cmath>

#include "specsense/error.hpp"
#include "specsense/rng.hpp"

namespace specsense {

std::string to_string(PrimaryKind k) { return k == PrimaryKind::Fm ? "fm" : "bpsk"; }

PrimaryKind primary_kind_from_string(const std::string& s) {
  if (s == "fm") return PrimaryKind::Fm;
  if (s == "bpsk") return PrimaryKind::Bpsk;
  throw InvalidArgument("primary.kind must be \"fm\" or \"bpsk\", got \"" + s + "\"");
}

std::string to_string(NoiseMode m) { return m == NoiseMode::Known ? "known" : "estimated"; }

NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "known") return NoiseMode::Known;
  if (s == "estimated") return NoiseMode::Estimated;
  throw InvalidArgument("features.noise_mode must be \"known\" or \"estimated\", got \"" + s + "\"");
}

void PrimaryConfig::validate() const {
  if (kind == PrimaryKind::Fm) fm.validate();
  require(bpsk_samples_per_symbol >= 1, "primary.bpsk_samples_per_symbol must be >= 1");
}

ComplexSignal synth_primary(const PrimaryConfig& cfg, std::size_t num_samples, std::uint64_t seed) {
  cfg.validate();
  if (cfg.kind == PrimaryKind::Fm) return synth_fm(cfg.fm, num_samples, seed);
  return synth_bpsk(cfg.bpsk_samples_per_symbol, cfg.fm.sample_rate_hz, num_samples, seed);
}

void FeatureConfig::validate() const {
  require(smoothing_L >= 1, "features.smoothing_L must be >= 1");
  require(llr_calibration_frames >= 1, "features.llr_calibration_frames must be >= 1");
  require(std::isfinite(llr_reference_snr_db), "features.llr_reference_snr_db must be finite");
  require(llr_shrinkage >= 0.0, "features.llr_shrinkage must be >= 0");
  require(llr_truncation >= 0.0 && llr_truncation < 1.0, "features.llr_truncation must be in [0, 1)");
  require(noise_calibration_samples >= 2, "features.noise_calibration_samples must be >= 2");
}

SignalCovariance calibrate_signal_covariance(const PrimaryConfig& primary, std::size_t frame_len,
                                             double noise_variance, const FeatureConfig& fc,
                                             std::uint64_t seed) {
  fc.validate();
  require(frame_len >= 1, "calibrate_signal_covariance: frame_len must be >= 1");
  const std::size_t count = fc.llr_calibration_frames;
  const ComplexSignal stream = synth_primary(primary, frame_len * count, seed);
  const double target_power = noise_variance * db_to_linear(fc.llr_reference_snr_db);
  const double scale = std::sqrt(target_power / stream.mean_power());

  std::vector<std::vector<cplx>> frames(count, std::vector<cplx>(frame_len));
  const auto s = stream.samples();
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t n = 0; n < frame_len; ++n) frames[k][n] = scale * s[k * frame_len + n];
  }
  return estimate_signal_covariance(frames, fc.llr_shrinkage);
}

NoiseModel resolve_noise_model(const ChannelConfig& channel, const FeatureConfig& fc, std::uint64_t seed) {
  channel.validate();
  if (fc.noise_mode == NoiseMode::Known) return NoiseModel(channel.noise_variance);
  const ComplexSignal buffer = synth_awgn(channel.noise_variance, fc.noise_calibration_samples, seed);
  return estimate_noise_model(buffer.samples());
}

FeatureExtractor build_feature_extractor(const PrimaryConfig& primary, const ChannelConfig& channel,
                                         const FeatureConfig& fc, std::size_t frame_len,
                                         std::uint64_t calibration_seed) {
  const NoiseModel noise =
      resolve_noise_model(channel, fc, derive_seed(calibration_seed, frame_len, StreamRole::NoiseFrame));
  const SignalCovariance cov = calibrate_signal_covariance(
      primary, frame_len, noise.variance, fc,
      derive_seed(calibration_seed, frame_len, StreamRole::Calibration));
  return FeatureExtractor(frame_len, noise, SmoothingConfig::for_frame(frame_len, fc.smoothing_L), cov,
                          fc.llr_truncation);
}

}  // namespace specsense
