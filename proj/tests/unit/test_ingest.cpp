#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "specsense/dataset_store.hpp"
#include "specsense/error.hpp"
#include "specsense/iq_file.hpp"
#include "specsense/model_io.hpp"
#include "specsense/rng.hpp"

using namespace specsense;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("specsense_ingest_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ComplexSignal unit_box_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> x(n);
  for (auto& v : x) v = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
  return ComplexSignal(std::move(x), 228000.0);
}

template <typename F>
FormatError::Kind error_kind(F&& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no FormatError";
  return FormatError::Kind::Schema;
}

LabeledDataset small_dataset() {
  DatasetConfig c;
  c.frame_len = 30;
  c.seq_len = 2;
  c.instances_per_class = 10;
  c.snr_grid_db = {-4, 0};
  FeatureConfig f;
  f.llr_calibration_frames = 100;
  return make_dataset(c, ChannelConfig{}, PrimaryConfig{}, f);
}

}  // namespace

// ---------------------------------------------------------------- IQ files

TEST(IqFile, F32RoundTripIsBitExact) {
  // Multiples of 2^-12 below 2^11 are exact in float.
  Rng rng(1);
  std::vector<cplx> x(1000);
  for (auto& v : x) {
    const double re = std::ldexp(std::round(4096.0 * rng.normal()), -12);
    const double im = std::ldexp(std::round(4096.0 * rng.normal()), -12);
    v = {re, im};
  }
  const ComplexSignal s(x, 1e6);
  const auto dir = temp_dir("f32");
  const auto rep = write_iq(s, dir / "a.iq", IqFormat::F32, 99.5e6);
  EXPECT_EQ(rep.samples, 1000u);
  EXPECT_EQ(rep.clipped, 0u);
  const auto rec = read_iq_recording(dir / "a.iq");
  EXPECT_EQ(rec.signal, s);
  EXPECT_EQ(rec.header.center_freq_hz, 99.5e6);
  EXPECT_EQ(rec.header.sample_rate_hz, 1e6);
  EXPECT_EQ(rec.header.format, IqFormat::F32);
  EXPECT_EQ(std::filesystem::file_size(dir / "a.iq"), kIqHeaderBytes + 1000 * 8);
}

TEST(IqFile, I16RoundTripWithinQuantization) {
  const auto s = unit_box_signal(5000, 2);
  const auto buf = encode_iq(s, IqFormat::I16);
  EXPECT_EQ(buf.bytes.size(), kIqHeaderBytes + 5000 * 4);
  const auto back = decode_iq(buf.bytes, IqFormat::I16).signal;
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_LE(std::abs(back.samples()[k].real() - s.samples()[k].real()), 1.0 / 32768.0);
    EXPECT_LE(std::abs(back.samples()[k].imag() - s.samples()[k].imag()), 1.0 / 32768.0);
  }
}

TEST(IqFile, I16ClipsAndCounts) {
  const ComplexSignal s({{2.0, 0.0}, {0.5, -0.25}}, 1.0);
  const auto buf = encode_iq(s, IqFormat::I16);
  EXPECT_EQ(buf.report.clipped, 1u);
  std::int16_t first = 0;
  std::memcpy(&first, buf.bytes.data() + kIqHeaderBytes, 2);
  EXPECT_EQ(first, 32767);
  const auto back = decode_iq(buf.bytes).signal;
  EXPECT_EQ(back.samples()[1], cplx(0.5, -0.25));
  EXPECT_EQ(encode_iq(ComplexSignal({{-1.0, -3.0}}, 1.0), IqFormat::I16).report.clipped, 1u);
}

TEST(IqFile, HeaderCountsWrittenSamples) {
  const auto buf = encode_iq(unit_box_signal(123, 3), IqFormat::F32);
  EXPECT_EQ(decode_iq_header(buf.bytes).sample_count, 123u);
  EXPECT_EQ(std::string(buf.bytes.begin(), buf.bytes.begin() + 4), "SPIQ");
}

TEST(IqFile, RejectsEmptySignal) {
  EXPECT_THROW(encode_iq(ComplexSignal({}, 1.0), IqFormat::F32), InvalidArgument);
}

TEST(IqFile, TruncatedPayloadNamesSizes) {
  auto bytes = encode_iq(unit_box_signal(10, 4), IqFormat::F32).bytes;
  bytes.resize(bytes.size() - 3);
  try {
    decode_iq(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::Truncated);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("80"), std::string::npos) << msg;
    EXPECT_NE(msg.find("77"), std::string::npos) << msg;
  }
  EXPECT_EQ(error_kind([&] { decode_iq(std::vector<std::uint8_t>(10, 0)); }), FormatError::Kind::Truncated);
}

TEST(IqFile, HeaderErrors) {
  const auto good = encode_iq(unit_box_signal(4, 5), IqFormat::F32).bytes;
  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(error_kind([&] { decode_iq(bad); }), FormatError::Kind::BadMagic);
  bad = good;
  bad[4] = 9;
  EXPECT_EQ(error_kind([&] { decode_iq(bad); }), FormatError::Kind::UnknownVersion);
  bad = good;
  bad[6] = 7;
  EXPECT_EQ(error_kind([&] { decode_iq(bad); }), FormatError::Kind::BadHeader);
  bad = good;
  bad.push_back(0);
  EXPECT_EQ(error_kind([&] { decode_iq(bad); }), FormatError::Kind::BadHeader);
  EXPECT_EQ(error_kind([&] { decode_iq(good, IqFormat::I16); }), FormatError::Kind::Schema);
  try {
    bad = good;
    bad[4] = 9;
    decode_iq(bad);
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(IqFile, MissingFileIsIoError) {
  EXPECT_THROW(read_iq("/nonexistent/specsense.iq"), IoError);
}

TEST(RawF32, InterleavedPairs) {
  const auto dir = temp_dir("raw");
  const float data[] = {0.5f, -1.0f, 0.25f, 2.0f};
  std::vector<std::uint8_t> bytes(sizeof data);
  std::memcpy(bytes.data(), data, sizeof data);
  spit(dir / "x.raw", bytes);
  const auto s = read_raw_f32(dir / "x.raw", 2.4e6);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.samples()[0], cplx(0.5, -1.0));
  EXPECT_EQ(s.samples()[1], cplx(0.25, 2.0));
  EXPECT_EQ(s.sample_rate_hz(), 2.4e6);
  bytes.pop_back();
  spit(dir / "y.raw", bytes);
  EXPECT_THROW(read_raw_f32(dir / "y.raw", 1.0), FormatError);
}

// ---------------------------------------------------------------- dataset store

TEST(Crc32, KnownVector) {
  const std::string s = "123456789";
  const std::vector<std::uint8_t> b(s.begin(), s.end());
  EXPECT_EQ(crc32_ieee(b), 0xCBF43926u);
}

TEST(DatasetStore, RoundTrip) {
  const auto ds = small_dataset();
  const auto dir = temp_dir("store");
  save_dataset(ds, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / kManifestFile));
  EXPECT_TRUE(std::filesystem::exists(dir / kFeatureStoreFile));
  EXPECT_EQ(load_dataset(dir), ds);
  const auto again = temp_dir("store2");
  save_dataset(ds, again);
  EXPECT_EQ(slurp(dir / kManifestFile), slurp(again / kManifestFile));
  EXPECT_EQ(slurp(dir / kFeatureStoreFile), slurp(again / kFeatureStoreFile));
}

TEST(DatasetStore, CorruptByteIsChecksumError) {
  const auto dir = temp_dir("corrupt");
  save_dataset(small_dataset(), dir);
  auto bytes = slurp(dir / kFeatureStoreFile);
  bytes[bytes.size() / 2] ^= 0x01;
  spit(dir / kFeatureStoreFile, bytes);
  EXPECT_EQ(error_kind([&] { load_dataset(dir); }), FormatError::Kind::Checksum);
}

TEST(DatasetStore, TruncatedStore) {
  const auto dir = temp_dir("short");
  save_dataset(small_dataset(), dir);
  auto bytes = slurp(dir / kFeatureStoreFile);
  bytes.resize(bytes.size() - 8);
  spit(dir / kFeatureStoreFile, bytes);
  EXPECT_EQ(error_kind([&] { load_dataset(dir); }), FormatError::Kind::Truncated);
}

TEST(DatasetStore, FutureVersionIsRejected) {
  const auto dir = temp_dir("future");
  save_dataset(small_dataset(), dir);
  auto bytes = slurp(dir / kManifestFile);
  std::string text(bytes.begin(), bytes.end());
  const auto pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 2");
  spit(dir / kManifestFile, {text.begin(), text.end()});
  EXPECT_EQ(error_kind([&] { load_dataset(dir); }), FormatError::Kind::UnknownVersion);
}

TEST(DatasetStore, MalformedManifestIsSchemaError) {
  const auto dir = temp_dir("schema");
  save_dataset(small_dataset(), dir);
  const std::string text = "{\"format\": \"specsense-dataset\"";
  spit(dir / kManifestFile, {text.begin(), text.end()});
  EXPECT_EQ(error_kind([&] { load_dataset(dir); }), FormatError::Kind::Schema);
  EXPECT_THROW(load_dataset(temp_dir("empty")), IoError);
}

// ---------------------------------------------------------------- model files

TEST(ModelIo, LstmRoundTrip) {
  const auto net = init_network(4, 5, 9);
  Normalizer n;
  n.mean = {1, 2, 3, 4};
  n.stddev = {0.5, 0.25, 2, 8};
  const auto bytes = encode_lstm_model(net, n);
  EXPECT_EQ(bytes.size(), 8 + 8 + 8 * (net.scalar_count() + 8));
  const auto d = decode_model(bytes);
  EXPECT_EQ(d.kind, ModelKind::Lstm);
  EXPECT_EQ(flatten(d.lstm), flatten(net));
  EXPECT_EQ(d.normalizer, n);

  const auto dir = temp_dir("model");
  save_model(dir / "m.lstm", bytes);
  const auto tm = load_lstm_model(dir / "m.lstm");
  EXPECT_EQ(flatten(tm.net), flatten(net));
  EXPECT_EQ(tm.normalizer, n);
}

TEST(ModelIo, GnbAndMlpRoundTrip) {
  Rng rng(3);
  std::vector<FeatureVector> x(20);
  std::vector<Hypothesis> y(20);
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (auto& u : x[k].u) u = rng.normal();
    y[k] = k % 2 ? Hypothesis::H1 : Hypothesis::H0;
  }
  const auto g = gnb_fit(x, y);
  const auto dg = decode_model(encode_gnb_model(g, Normalizer{}));
  EXPECT_EQ(dg.kind, ModelKind::Gnb);
  EXPECT_EQ(dg.gnb, g);

  MlpTrainConfig cfg;
  cfg.hidden = 6;
  cfg.epochs = 2;
  const auto m = mlp_fit(x, y, cfg);
  const auto dm = decode_model(encode_mlp_model(m, Normalizer{}));
  EXPECT_EQ(dm.kind, ModelKind::Mlp);
  EXPECT_EQ(flatten(dm.mlp), flatten(m));
}

TEST(ModelIo, HeaderErrors) {
  const auto good = encode_lstm_model(init_network(4, 3, 1), Normalizer{});
  auto bad = good;
  bad[1] = 'x';
  EXPECT_EQ(error_kind([&] { decode_model(bad); }), FormatError::Kind::BadMagic);
  bad = good;
  bad[4] = 2;
  EXPECT_EQ(error_kind([&] { decode_model(bad); }), FormatError::Kind::UnknownVersion);
  bad = good;
  bad[6] = 42;
  EXPECT_EQ(error_kind([&] { decode_model(bad); }), FormatError::Kind::BadHeader);
  bad = good;
  bad.resize(bad.size() - 1);
  EXPECT_EQ(error_kind([&] { decode_model(bad); }), FormatError::Kind::Truncated);
  bad = good;
  bad.push_back(0);
  EXPECT_EQ(error_kind([&] { decode_model(bad); }), FormatError::Kind::BadHeader);

  const auto dir = temp_dir("model_kind");
  save_model(dir / "g.gnb", encode_gnb_model(GnbModel{}, Normalizer{}));
  EXPECT_THROW(load_lstm_model(dir / "g.gnb"), FormatError);
}
