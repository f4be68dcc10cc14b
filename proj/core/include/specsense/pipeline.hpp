#pragma once

#include <cstdint>
#include <string>

#include "specsense/features.hpp"
#include "specsense/signal.hpp"

namespace specsense {

enum class PrimaryKind { Fm, Bpsk };

std::string to_string(PrimaryKind k);
PrimaryKind primary_kind_from_string(const std::string& s);

/// Which primary-user waveform the simulator transmits.
struct PrimaryConfig {
  PrimaryKind kind = PrimaryKind::Fm;
  FmSource fm;
  std::size_t bpsk_samples_per_symbol = 8;

  void validate() const;
  friend bool operator==(const PrimaryConfig&, const PrimaryConfig&) = default;
};

/// Unit-power primary waveform of `num_samples` samples.
ComplexSignal synth_primary(const PrimaryConfig& cfg, std::size_t num_samples, std::uint64_t seed);

enum class NoiseMode { Known, Estimated };

std::string to_string(NoiseMode m);
NoiseMode noise_mode_from_string(const std::string& s);

/// How u1..u4 are computed.
struct FeatureConfig {
  std::size_t smoothing_L = 10;
  std::size_t llr_calibration_frames = 2000;
  double llr_reference_snr_db = -10.0;  ///< signal power the covariance is scaled to
  double llr_shrinkage = 1e-6;
  double llr_truncation = 1e-12;
  NoiseMode noise_mode = NoiseMode::Known;
  std::size_t noise_calibration_samples = 100000;

  void validate() const;
  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// Primary-signal covariance over `frame_len` samples, estimated from
/// calibration frames scaled to noise_variance * 10^(reference_snr/10).
SignalCovariance calibrate_signal_covariance(const PrimaryConfig& primary, std::size_t frame_len,
                                             double noise_variance, const FeatureConfig& fc,
                                             std::uint64_t seed);

/// Noise model per `fc.noise_mode`: the channel's variance, or an estimate
/// from a noise-only calibration buffer.
NoiseModel resolve_noise_model(const ChannelConfig& channel, const FeatureConfig& fc, std::uint64_t seed);

/// Builds the extractor for one frame length from a calibration seed.
FeatureExtractor build_feature_extractor(const PrimaryConfig& primary, const ChannelConfig& channel,
                                         const FeatureConfig& fc, std::size_t frame_len,
                                         std::uint64_t calibration_seed);

}  // namespace specsense
