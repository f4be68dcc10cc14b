#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace specsense {

using cplx = std::complex<double>;

/// Complex baseband samples with their sample rate.
class ComplexSignal {
 public:
  ComplexSignal(std::vector<cplx> samples, double sample_rate_hz);

  std::span<const cplx> samples() const noexcept { return samples_; }
  std::vector<cplx>& mutable_samples() noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  /// Mean of |x(n)|^2. Zero for an empty signal.
  double mean_power() const noexcept;

  friend bool operator==(const ComplexSignal&, const ComplexSignal&) = default;

 private:
  std::vector<cplx> samples_;
  double sample_rate_hz_;
};

/// Busy/idle hypothesis; the numeric value is the class label.
enum class Hypothesis : std::uint8_t { H0 = 0, H1 = 1 };

inline int label_of(Hypothesis h) noexcept { return static_cast<int>(h); }

/// Scalar channel between primary transmitter and sensor.
struct ChannelConfig {
  double gain_h = 1.0;
  double noise_variance = 1.0;  ///< total complex variance sigma_v^2
  double target_snr_db = 0.0;

  /// Throws InvalidArgument unless gain_h > 0 and noise_variance > 0.
  void validate() const;
  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

/// Parameters of the single-tone FM primary.
struct FmSource {
  double message_freq_hz = 1000.0;
  double deviation_hz = 5000.0;
  double sample_rate_hz = 228000.0;

  void validate() const;
  friend bool operator==(const FmSource&, const FmSource&) = default;
};

/// s(n) = exp(j phi(n)), phi(n) = phi0 + 2 pi dev * sum_{m<=n} sin(2 pi fm m / fs) / fs.
/// phi0 is drawn uniformly from [0, 2 pi) using `seed`.
ComplexSignal synth_fm(double message_freq_hz, double deviation_hz, double sample_rate_hz,
                       std::size_t num_samples, std::uint64_t seed);

inline ComplexSignal synth_fm(const FmSource& src, std::size_t num_samples, std::uint64_t seed) {
  return synth_fm(src.message_freq_hz, src.deviation_hz, src.sample_rate_hz, num_samples, seed);
}

/// Rectangular-pulse BPSK with unit power and random symbols.
ComplexSignal synth_bpsk(std::size_t samples_per_symbol, double sample_rate_hz,
                         std::size_t num_samples, std::uint64_t seed);

/// Circularly-symmetric AWGN, E|w|^2 = noise_variance. Sample rate is set to 1.
ComplexSignal synth_awgn(double noise_variance, std::size_t num_samples, std::uint64_t seed);

/// Amplitude h' such that h'^2 * mean|s|^2 / noise_variance equals the target SNR.
/// The configured gain_h is absorbed into this calibration.
double calibrated_gain(const ComplexSignal& signal, const ChannelConfig& cfg);

/// r(n) = h' s(n) + w(n) with h' from calibrated_gain and w drawn from `seed`.
ComplexSignal apply_channel(const ComplexSignal& signal, const ChannelConfig& cfg,
                            std::uint64_t seed);

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) noexcept { return 10.0 * std::log10(ratio); }

}  // namespace specsense
