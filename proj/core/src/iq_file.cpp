#include "specsense/iq_file.hpp"

#include <cmath>
#include <cstring>

#include "binary_io.hpp"
#include "specsense/error.hpp"

namespace specsense {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'I', 'Q'};

std::int16_t to_i16(double x, std::uint64_t& clipped) {
  if (x > 1.0 || x < -1.0) ++clipped;
  const double q = std::round(x * 32768.0);
  if (q >= 32767.0) return 32767;
  if (q <= -32768.0) return -32768;
  return static_cast<std::int16_t>(q);
}

}  // namespace

std::size_t bytes_per_sample(IqFormat format) noexcept { return format == IqFormat::F32 ? 8 : 4; }

IqBuffer encode_iq(const ComplexSignal& signal, IqFormat format, double center_freq_hz) {
  require(!signal.empty(), "write_iq: signal has no samples");
  require(format == IqFormat::F32 || format == IqFormat::I16, "write_iq: unknown sample format");
  require(std::isfinite(center_freq_hz), "write_iq: center frequency must be finite");

  detail::ByteWriter w;
  w.buffer().reserve(kIqHeaderBytes + signal.size() * bytes_per_sample(format));
  w.bytes(kMagic, 4);
  w.u16(kIqVersion);
  w.u16(static_cast<std::uint16_t>(format));
  w.f64(signal.sample_rate_hz());
  w.f64(center_freq_hz);
  w.u64(signal.size());

  IqBuffer out;
  out.report.samples = signal.size();
  for (const cplx& v : signal.samples()) {
    if (format == IqFormat::F32) {
      w.f32(static_cast<float>(v.real()));
      w.f32(static_cast<float>(v.imag()));
    } else {
      w.i16(to_i16(v.real(), out.report.clipped));
      w.i16(to_i16(v.imag(), out.report.clipped));
    }
  }
  out.bytes = std::move(w.buffer());
  return out;
}

IqFileHeader decode_iq_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kIqHeaderBytes) {
    throw FormatError(FormatError::Kind::Truncated, bytes.size(),
                      "IQ file: truncated header, expected " + std::to_string(kIqHeaderBytes) + " bytes, got " +
                          std::to_string(bytes.size()));
  }
  detail::ByteReader rd(bytes);
  char magic[4];
  rd.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(FormatError::Kind::BadMagic, 0, "IQ file: bad magic (expected \"SPIQ\")");
  }
  IqFileHeader h;
  h.version = rd.u16("version");
  if (h.version != kIqVersion) {
    throw FormatError(FormatError::Kind::UnknownVersion, 4, "IQ file: unknown version " + std::to_string(h.version));
  }
  const std::uint16_t fmt = rd.u16("sample format");
  if (fmt > 1) {
    throw FormatError(FormatError::Kind::BadHeader, 6, "IQ file: unknown sample format " + std::to_string(fmt));
  }
  h.format = static_cast<IqFormat>(fmt);
  h.sample_rate_hz = rd.f64("sample rate");
  if (!(h.sample_rate_hz > 0.0) || !std::isfinite(h.sample_rate_hz)) {
    throw FormatError(FormatError::Kind::BadHeader, 8, "IQ file: sample rate must be positive and finite");
  }
  h.center_freq_hz = rd.f64("center frequency");
  h.sample_count = rd.u64("sample count");
  return h;
}

IqRecording decode_iq(const std::vector<std::uint8_t>& bytes, std::optional<IqFormat> expected) {
  const IqFileHeader h = decode_iq_header(bytes);
  if (expected && *expected != h.format) {
    throw FormatError(FormatError::Kind::Schema, 6,
                      std::string("IQ file: sample format is ") + (h.format == IqFormat::F32 ? "f32" : "i16") +
                          ", expected " + (*expected == IqFormat::F32 ? "f32" : "i16"));
  }
  const std::uint64_t actual = bytes.size() - kIqHeaderBytes;
  const std::uint64_t per = bytes_per_sample(h.format);
  if (h.sample_count > actual / per || h.sample_count * per != actual) {
    const bool short_payload = h.sample_count > actual / per;
    const std::string expected_bytes =
        short_payload && h.sample_count > (UINT64_MAX / per) ? std::string("more than 2^64")
                                                              : std::to_string(h.sample_count * per);
    throw FormatError(short_payload ? FormatError::Kind::Truncated : FormatError::Kind::BadHeader,
                      kIqHeaderBytes + std::min(actual, h.sample_count * per),
                      std::string("IQ file: payload ") + (short_payload ? "truncated" : "has trailing bytes") +
                          ", expected " + expected_bytes + " payload bytes, got " + std::to_string(actual));
  }

  detail::ByteReader rd(bytes);
  std::uint8_t skip[kIqHeaderBytes];
  rd.bytes(skip, kIqHeaderBytes, "header");
  std::vector<cplx> samples(h.sample_count);
  for (auto& s : samples) {
    if (h.format == IqFormat::F32) {
      const float i = rd.f32("sample");
      const float q = rd.f32("sample");
      s = {static_cast<double>(i), static_cast<double>(q)};
    } else {
      const std::int16_t i = rd.i16("sample");
      const std::int16_t q = rd.i16("sample");
      s = {i / 32768.0, q / 32768.0};
    }
  }
  return {h, ComplexSignal(std::move(samples), h.sample_rate_hz)};
}

IqWriteReport write_iq(const ComplexSignal& signal, const std::filesystem::path& path, IqFormat format,
                       double center_freq_hz) {
  IqBuffer buf = encode_iq(signal, format, center_freq_hz);
  detail::write_file(path, buf.bytes);
  return buf.report;
}

IqRecording read_iq_recording(const std::filesystem::path& path, std::optional<IqFormat> expected) {
  try {
    return decode_iq(detail::read_file(path), expected);
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.what());
  }
}

ComplexSignal read_iq(const std::filesystem::path& path, std::optional<IqFormat> expected) {
  return read_iq_recording(path, expected).signal;
}

ComplexSignal read_raw_f32(const std::filesystem::path& path, double sample_rate_hz) {
  require(sample_rate_hz > 0.0, "read_raw_f32: sample rate must be > 0");
  const auto bytes = detail::read_file(path);
  if (bytes.empty() || bytes.size() % 8 != 0) {
    throw FormatError(FormatError::Kind::Truncated, bytes.size() - bytes.size() % 8,
                      path.string() + ": raw f32 IQ length " + std::to_string(bytes.size()) +
                          " is not a positive multiple of 8 bytes");
  }
  detail::ByteReader rd(bytes);
  std::vector<cplx> samples(bytes.size() / 8);
  for (auto& s : samples) {
    const float i = rd.f32("sample");
    const float q = rd.f32("sample");
    s = {static_cast<double>(i), static_cast<double>(q)};
  }
  return ComplexSignal(std::move(samples), sample_rate_hz);
}

}  // namespace specsense
