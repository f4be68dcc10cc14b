#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace specsense {

/// Stream roles mixed into derived seeds so that independent consumers of
/// one master seed never share a random stream.
enum class StreamRole : std::uint64_t {
  NoiseFrame = 1,
  PrimarySignal = 2,
  Channel = 3,
  SnrDraw = 4,
  Calibration = 5,
  Shuffle = 6,
  Init = 7,
  Dropout = 8,
  Trial = 9,
  Threshold = 10,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic seed for (master, index, role). Independent of thread schedule.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, StreamRole role) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t role) noexcept;

/// FNV-1a of a label, for named sub-streams ("train", "sweep", ...).
std::uint64_t hash_label(std::string_view label) noexcept;

/// Portable random source: mt19937_64 engine with hand-written uniform and
/// normal transforms so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal (Box-Muller, cached pair).
  double normal() noexcept;
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) noexcept;

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace specsense
