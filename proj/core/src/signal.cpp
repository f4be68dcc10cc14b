#include "specsense/signal.hpp"

#include <cmath>
#include <numbers>

#include "specsense/error.hpp"
#include "specsense/rng.hpp"

namespace specsense {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ComplexSignal::ComplexSignal(std::vector<cplx> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  require(sample_rate_hz > 0.0 && std::isfinite(sample_rate_hz),
          "ComplexSignal: sample_rate_hz must be positive");
}

double ComplexSignal::mean_power() const noexcept {
  if (samples_.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& x : samples_) acc += std::norm(x);
  return acc / static_cast<double>(samples_.size());
}

void ChannelConfig::validate() const {
  require(gain_h > 0.0 && std::isfinite(gain_h), "channel.gain_h must be > 0");
  require(noise_variance > 0.0 && std::isfinite(noise_variance),
          "channel.noise_variance must be > 0");
  require(std::isfinite(target_snr_db), "channel.target_snr_db must be finite");
}

void FmSource::validate() const {
  require(sample_rate_hz > 0.0, "fm.sample_rate_hz must be > 0");
  require(message_freq_hz > 0.0 && message_freq_hz < sample_rate_hz / 2.0,
          "fm.message_freq_hz must lie in (0, sample_rate_hz/2)");
  require(deviation_hz > 0.0, "fm.deviation_hz must be > 0");
}

ComplexSignal synth_fm(double message_freq_hz, double deviation_hz, double sample_rate_hz,
                       std::size_t num_samples, std::uint64_t seed) {
  FmSource{message_freq_hz, deviation_hz, sample_rate_hz}.validate();
  require(num_samples >= 1, "synth_fm: num_samples must be >= 1");

  Rng rng(seed);
  const double phi0 = kTwoPi * rng.uniform();
  const double msg_step = kTwoPi * message_freq_hz / sample_rate_hz;
  const double phase_gain = kTwoPi * deviation_hz / sample_rate_hz;

  std::vector<cplx> out(num_samples);
  double integral = 0.0;
  for (std::size_t n = 0; n < num_samples; ++n) {
    integral += std::sin(msg_step * static_cast<double>(n));
    const double phi = phi0 + phase_gain * integral;
    out[n] = {std::cos(phi), std::sin(phi)};
  }
  return ComplexSignal(std::move(out), sample_rate_hz);
}

ComplexSignal synth_bpsk(std::size_t samples_per_symbol, double sample_rate_hz,
                         std::size_t num_samples, std::uint64_t seed) {
  require(samples_per_symbol >= 1, "synth_bpsk: samples_per_symbol must be >= 1");
  require(num_samples >= 1, "synth_bpsk: num_samples must be >= 1");
  Rng rng(seed);
  const double phi0 = kTwoPi * rng.uniform();
  const cplx carrier{std::cos(phi0), std::sin(phi0)};
  std::vector<cplx> out(num_samples);
  double symbol = 1.0;
  for (std::size_t n = 0; n < num_samples; ++n) {
    if (n % samples_per_symbol == 0) symbol = rng.uniform() < 0.5 ? -1.0 : 1.0;
    out[n] = symbol * carrier;
  }
  return ComplexSignal(std::move(out), sample_rate_hz);
}

ComplexSignal synth_awgn(double noise_variance, std::size_t num_samples, std::uint64_t seed) {
  require(noise_variance >= 0.0 && std::isfinite(noise_variance),
          "synth_awgn: noise_variance must be >= 0");
  require(num_samples >= 1, "synth_awgn: num_samples must be >= 1");
  Rng rng(seed);
  std::vector<cplx> out(num_samples);
  for (auto& w : out) w = rng.complex_normal(noise_variance);
  return ComplexSignal(std::move(out), 1.0);
}

double calibrated_gain(const ComplexSignal& signal, const ChannelConfig& cfg) {
  cfg.validate();
  require(!signal.empty(), "apply_channel: signal is empty");
  const double power = signal.mean_power();
  require(power > 0.0, "apply_channel: all-zero signal has undefined SNR");
  return std::sqrt(cfg.noise_variance * db_to_linear(cfg.target_snr_db) / power);
}

ComplexSignal apply_channel(const ComplexSignal& signal, const ChannelConfig& cfg,
                            std::uint64_t seed) {
  const double gain = calibrated_gain(signal, cfg);
  Rng rng(seed);
  std::vector<cplx> out(signal.size());
  const auto in = signal.samples();
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = gain * in[n] + rng.complex_normal(cfg.noise_variance);
  }
  return ComplexSignal(std::move(out), signal.sample_rate_hz());
}

}  // namespace specsense
