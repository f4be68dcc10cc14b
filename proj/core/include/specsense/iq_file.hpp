#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "specsense/signal.hpp"

namespace specsense {

/// SPIQ container, all fields little-endian:
///   offset  0  char[4]  "SPIQ"
///   offset  4  u16      version (1)
///   offset  6  u16      sample format (0 = f32 interleaved, 1 = i16 interleaved)
///   offset  8  f64      sample rate, Hz
///   offset 16  f64      center frequency, Hz
///   offset 24  u64      sample count
///   offset 32  payload  I then Q per sample
enum class IqFormat : std::uint16_t { F32 = 0, I16 = 1 };

inline constexpr std::uint16_t kIqVersion = 1;
inline constexpr std::size_t kIqHeaderBytes = 32;

struct IqFileHeader {
  std::uint16_t version = kIqVersion;
  IqFormat format = IqFormat::F32;
  double sample_rate_hz = 1.0;
  double center_freq_hz = 0.0;
  std::uint64_t sample_count = 0;
  friend bool operator==(const IqFileHeader&, const IqFileHeader&) = default;
};

std::size_t bytes_per_sample(IqFormat format) noexcept;

struct IqWriteReport {
  std::uint64_t samples = 0;
  std::uint64_t clipped = 0;  ///< i16 components with |x| > 1 saturated
};

struct IqBuffer {
  std::vector<std::uint8_t> bytes;
  IqWriteReport report;
};

/// Serializes a non-empty signal. i16 maps x to round(32768 x) clamped to
/// [-32768, 32767]; components outside [-1, 1] count as clipped.
IqBuffer encode_iq(const ComplexSignal& signal, IqFormat format, double center_freq_hz = 0.0);

struct IqRecording {
  IqFileHeader header;
  ComplexSignal signal;
};

/// Parses a buffer. `expected` rejects files of another sample format.
IqRecording decode_iq(const std::vector<std::uint8_t>& bytes, std::optional<IqFormat> expected = std::nullopt);
IqFileHeader decode_iq_header(const std::vector<std::uint8_t>& bytes);

IqWriteReport write_iq(const ComplexSignal& signal, const std::filesystem::path& path, IqFormat format,
                       double center_freq_hz = 0.0);
ComplexSignal read_iq(const std::filesystem::path& path, std::optional<IqFormat> expected = std::nullopt);
IqRecording read_iq_recording(const std::filesystem::path& path,
                              std::optional<IqFormat> expected = std::nullopt);

/// Headerless interleaved little-endian f32 I/Q, as written by common SDR tools.
ComplexSignal read_raw_f32(const std::filesystem::path& path, double sample_rate_hz);

}  // namespace specsense
