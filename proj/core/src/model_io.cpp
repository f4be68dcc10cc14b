#include "specsense/model_io.hpp"

#include <fstream>

#include "binary_io.hpp"

namespace specsense {

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path.string(), "read failed");
  return data;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace detail

namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr char kMagic[4] = {'S', 'S', 'M', 'D'};

template <typename M>
void put_row_major(ByteWriter& w, const M& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  }
}

template <typename M>
void get_row_major(ByteReader& rd, M& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rd.f64(what);
  }
}

void put_normalizer(ByteWriter& w, const Normalizer& n) {
  for (double v : n.mean) w.f64(v);
  for (double v : n.stddev) w.f64(v);
}

Normalizer get_normalizer(ByteReader& rd) {
  Normalizer n;
  for (double& v : n.mean) v = rd.f64("normalizer mean");
  for (double& v : n.stddev) v = rd.f64("normalizer stddev");
  return n;
}

ByteWriter header(ModelKind kind) {
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u16(kModelFileVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(0);
  return w;
}

constexpr Gate kGateOrder[] = {Gate::Forget, Gate::Candidate, Gate::Input, Gate::Output};

}  // namespace

std::vector<std::uint8_t> encode_lstm_model(const LstmNetwork& net, const Normalizer& normalizer) {
  ByteWriter w = header(ModelKind::Lstm);
  w.u32(static_cast<std::uint32_t>(net.input_dim()));
  w.u32(static_cast<std::uint32_t>(net.hidden_dim()));
  for (Gate g : kGateOrder) {
    put_row_major(w, net.lstm.wx(g));
    put_row_major(w, net.lstm.wh(g));
    const auto b = net.lstm.bias(g);
    for (Eigen::Index k = 0; k < b.size(); ++k) w.f64(b(k));
  }
  put_row_major(w, net.head.W);
  w.f64(net.head.b(0));
  w.f64(net.head.b(1));
  put_normalizer(w, normalizer);
  return std::move(w.buffer());
}

std::vector<std::uint8_t> encode_gnb_model(const GnbModel& model, const Normalizer& normalizer) {
  ByteWriter w = header(ModelKind::Gnb);
  w.f64(model.variance_smoothing);
  for (double p : model.prior) w.f64(p);
  for (const auto& row : model.mean) {
    for (double v : row) w.f64(v);
  }
  for (const auto& row : model.var) {
    for (double v : row) w.f64(v);
  }
  put_normalizer(w, normalizer);
  return std::move(w.buffer());
}

std::vector<std::uint8_t> encode_mlp_model(const MlpModel& model, const Normalizer& normalizer) {
  ByteWriter w = header(ModelKind::Mlp);
  w.u32(static_cast<std::uint32_t>(model.W1.cols()));
  w.u32(static_cast<std::uint32_t>(model.hidden_dim()));
  put_row_major(w, model.W1);
  for (Eigen::Index k = 0; k < model.b1.size(); ++k) w.f64(model.b1(k));
  put_row_major(w, model.W2);
  w.f64(model.b2(0));
  w.f64(model.b2(1));
  put_normalizer(w, normalizer);
  return std::move(w.buffer());
}

DecodedModel decode_model(const std::vector<std::uint8_t>& bytes) {
  ByteReader rd(bytes);
  char magic[4];
  rd.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(FormatError::Kind::BadMagic, 0, "model file: bad magic (expected \"SSMD\")");
  }
  const std::uint16_t version = rd.u16("version");
  if (version != kModelFileVersion) {
    throw FormatError(FormatError::Kind::UnknownVersion, 4,
                      "model file: unsupported version " + std::to_string(version));
  }
  const std::size_t kind_offset = rd.offset();
  const std::uint8_t kind = rd.u8("kind");
  rd.u8("reserved");

  DecodedModel out;
  switch (kind) {
    case static_cast<std::uint8_t>(ModelKind::Lstm): {
      out.kind = ModelKind::Lstm;
      const std::size_t dims_offset = rd.offset();
      const std::uint32_t i = rd.u32("input_dim");
      const std::uint32_t h = rd.u32("hidden_dim");
      if (i != kNumFeatures || h == 0 || h > 1u << 16) {
        throw FormatError(FormatError::Kind::BadHeader, dims_offset,
                          "model file: implausible LSTM dimensions i=" + std::to_string(i) +
                              " h=" + std::to_string(h));
      }
      out.lstm = LstmNetwork(i, h);
      for (Gate g : kGateOrder) {
        auto wx = out.lstm.lstm.wx(g);
        get_row_major(rd, wx, "gate input weights");
        auto wh = out.lstm.lstm.wh(g);
        get_row_major(rd, wh, "gate recurrent weights");
        auto b = out.lstm.lstm.bias(g);
        for (Eigen::Index k = 0; k < b.size(); ++k) b(k) = rd.f64("gate bias");
      }
      get_row_major(rd, out.lstm.head.W, "head weights");
      out.lstm.head.b(0) = rd.f64("head bias");
      out.lstm.head.b(1) = rd.f64("head bias");
      break;
    }
    case static_cast<std::uint8_t>(ModelKind::Gnb): {
      out.kind = ModelKind::Gnb;
      out.gnb.variance_smoothing = rd.f64("variance_smoothing");
      for (double& p : out.gnb.prior) p = rd.f64("prior");
      for (auto& row : out.gnb.mean) {
        for (double& v : row) v = rd.f64("mean");
      }
      for (auto& row : out.gnb.var) {
        for (double& v : row) v = rd.f64("variance");
      }
      break;
    }
    case static_cast<std::uint8_t>(ModelKind::Mlp): {
      out.kind = ModelKind::Mlp;
      const std::size_t dims_offset = rd.offset();
      const std::uint32_t i = rd.u32("input_dim");
      const std::uint32_t h = rd.u32("hidden_dim");
      if (i != kNumFeatures || h == 0 || h > 1u << 16) {
        throw FormatError(FormatError::Kind::BadHeader, dims_offset, "model file: implausible MLP dimensions");
      }
      out.mlp = MlpModel(i, h);
      get_row_major(rd, out.mlp.W1, "W1");
      for (Eigen::Index k = 0; k < out.mlp.b1.size(); ++k) out.mlp.b1(k) = rd.f64("b1");
      get_row_major(rd, out.mlp.W2, "W2");
      out.mlp.b2(0) = rd.f64("b2");
      out.mlp.b2(1) = rd.f64("b2");
      break;
    }
    default:
      throw FormatError(FormatError::Kind::BadHeader, kind_offset,
                        "model file: unknown model kind " + std::to_string(kind));
  }
  out.normalizer = get_normalizer(rd);
  if (rd.remaining() != 0) {
    throw FormatError(FormatError::Kind::BadHeader, rd.offset(),
                      "model file: " + std::to_string(rd.remaining()) + " trailing bytes");
  }
  return out;
}

void save_model(const std::filesystem::path& path, const std::vector<std::uint8_t>& encoded) {
  detail::write_file(path, encoded);
}

DecodedModel load_model(const std::filesystem::path& path) {
  try {
    return decode_model(detail::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.what());
  }
}

TrainedModel load_lstm_model(const std::filesystem::path& path) {
  DecodedModel m = load_model(path);
  if (m.kind != ModelKind::Lstm) {
    throw FormatError(FormatError::Kind::Schema, 6, path.string() + ": not an LSTM model file");
  }
  TrainedModel out;
  out.net = std::move(m.lstm);
  out.normalizer = m.normalizer;
  return out;
}

}  // namespace specsense
