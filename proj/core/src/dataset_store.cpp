#include "specsense/dataset_store.hpp"

#include <zlib.h>

#include <bit>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "specsense/error.hpp"

namespace specsense {

using nlohmann::json;

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) noexcept {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

json to_json(const DatasetConfig& c) {
  return {{"frame_len", c.frame_len},
          {"seq_len", c.seq_len},
          {"snr_grid_db", c.snr_grid_db},
          {"instances_per_class", c.instances_per_class},
          {"split_ratios", c.split_ratios}};
}

json to_json(const GenerationInfo& g) {
  const auto& fm = g.primary.fm;
  const auto& f = g.features;
  return {{"channel",
           {{"gain_h", g.channel.gain_h},
            {"noise_variance", g.channel.noise_variance},
            {"target_snr_db", g.channel.target_snr_db}}},
          {"primary",
           {{"kind", to_string(g.primary.kind)},
            {"message_freq_hz", fm.message_freq_hz},
            {"deviation_hz", fm.deviation_hz},
            {"sample_rate_hz", fm.sample_rate_hz},
            {"bpsk_samples_per_symbol", g.primary.bpsk_samples_per_symbol}}},
          {"features",
           {{"smoothing_L", f.smoothing_L},
            {"llr_calibration_frames", f.llr_calibration_frames},
            {"llr_reference_snr_db", f.llr_reference_snr_db},
            {"llr_shrinkage", f.llr_shrinkage},
            {"llr_truncation", f.llr_truncation},
            {"noise_mode", to_string(f.noise_mode)},
            {"noise_calibration_samples", f.noise_calibration_samples}}}};
}

DatasetConfig dataset_config_from(const json& j, std::uint64_t seed) {
  DatasetConfig c;
  c.frame_len = j.at("frame_len").get<std::size_t>();
  c.seq_len = j.at("seq_len").get<std::size_t>();
  c.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
  c.instances_per_class = j.at("instances_per_class").get<std::size_t>();
  c.split_ratios = j.at("split_ratios").get<std::array<double, 3>>();
  c.master_seed = seed;
  return c;
}

GenerationInfo generation_from(const json& j) {
  GenerationInfo g;
  const json& ch = j.at("channel");
  g.channel.gain_h = ch.at("gain_h").get<double>();
  g.channel.noise_variance = ch.at("noise_variance").get<double>();
  g.channel.target_snr_db = ch.at("target_snr_db").get<double>();
  const json& p = j.at("primary");
  g.primary.kind = primary_kind_from_string(p.at("kind").get<std::string>());
  g.primary.fm.message_freq_hz = p.at("message_freq_hz").get<double>();
  g.primary.fm.deviation_hz = p.at("deviation_hz").get<double>();
  g.primary.fm.sample_rate_hz = p.at("sample_rate_hz").get<double>();
  g.primary.bpsk_samples_per_symbol = p.at("bpsk_samples_per_symbol").get<std::size_t>();
  const json& f = j.at("features");
  g.features.smoothing_L = f.at("smoothing_L").get<std::size_t>();
  g.features.llr_calibration_frames = f.at("llr_calibration_frames").get<std::size_t>();
  g.features.llr_reference_snr_db = f.at("llr_reference_snr_db").get<double>();
  g.features.llr_shrinkage = f.at("llr_shrinkage").get<double>();
  g.features.llr_truncation = f.at("llr_truncation").get<double>();
  g.features.noise_mode = noise_mode_from_string(f.at("noise_mode").get<std::string>());
  g.features.noise_calibration_samples = f.at("noise_calibration_samples").get<std::size_t>();
  return g;
}

Split split_from(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw FormatError(FormatError::Kind::Schema, 0, "manifest: unknown split \"" + s + "\"");
}

}  // namespace

void save_dataset(const LabeledDataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());

  const std::size_t per_record = dataset.config.seq_len * kNumFeatures;
  detail::ByteWriter store;
  store.buffer().reserve(dataset.size() * per_record * 8);
  json records = json::array();
  std::uint64_t offset = 0;
  for (Split s : {Split::Train, Split::Validation, Split::Test}) {
    for (const Record& r : dataset.split(s)) {
      require(r.features.size() == dataset.config.seq_len, "save_dataset: record length differs from seq_len");
      for (const FeatureVector& v : r.features) {
        for (double x : v.u) store.f64(x);
      }
      records.push_back({{"split", to_string(s)},
                         {"label", label_of(r.label)},
                         {"snr_db", r.snr_db},
                         {"instance", r.instance},
                         {"offset", offset},
                         {"length", per_record}});
      offset += per_record;
    }
  }

  json manifest;
  manifest["format"] = "specsense-dataset";
  manifest["version"] = kDatasetStoreVersion;
  manifest["master_seed"] = dataset.config.master_seed;
  manifest["config"] = to_json(dataset.config);
  manifest["generation"] = to_json(dataset.generation);
  manifest["normalizer"] = {{"mean", dataset.normalizer.mean}, {"stddev", dataset.normalizer.stddev}};
  manifest["store"] = {{"file", kFeatureStoreFile},
                       {"encoding", "float64-le"},
                       {"values", offset},
                       {"crc32", crc32_ieee(store.buffer())}};
  manifest["records"] = std::move(records);

  detail::write_file(dir / kFeatureStoreFile, store.buffer());
  detail::write_text_file(dir / kManifestFile, manifest.dump(1) + "\n");
}

LabeledDataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  const auto manifest_bytes = detail::read_file(manifest_path);
  const std::string where = manifest_path.string() + ": ";

  json m;
  try {
    m = json::parse(manifest_bytes.begin(), manifest_bytes.end());
  } catch (const json::parse_error& e) {
    throw FormatError(FormatError::Kind::Schema, e.byte, where + "invalid JSON: " + e.what());
  }

  try {
    if (!m.is_object() || m.value("format", std::string()) != "specsense-dataset") {
      throw FormatError(FormatError::Kind::BadMagic, 0, where + "not a specsense dataset manifest");
    }
    const int version = m.at("version").get<int>();
    if (version != kDatasetStoreVersion) {
      throw FormatError(FormatError::Kind::UnknownVersion, 0,
                        where + "manifest version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kDatasetStoreVersion) + ")");
    }

    LabeledDataset ds;
    ds.config = dataset_config_from(m.at("config"), m.at("master_seed").get<std::uint64_t>());
    ds.generation = generation_from(m.at("generation"));
    ds.normalizer.mean = m.at("normalizer").at("mean").get<std::array<double, kNumFeatures>>();
    ds.normalizer.stddev = m.at("normalizer").at("stddev").get<std::array<double, kNumFeatures>>();

    const json& store_info = m.at("store");
    const auto store_path = dir / store_info.at("file").get<std::string>();
    const auto store = detail::read_file(store_path);
    const auto values = store_info.at("values").get<std::uint64_t>();
    if (store.size() != values * 8) {
      throw FormatError(FormatError::Kind::Truncated, store.size(),
                        store_path.string() + ": expected " + std::to_string(values * 8) + " bytes, got " +
                            std::to_string(store.size()));
    }
    const auto expected_crc = store_info.at("crc32").get<std::uint32_t>();
    const std::uint32_t actual_crc = crc32_ieee(store);
    if (actual_crc != expected_crc) {
      throw FormatError(FormatError::Kind::Checksum, 0,
                        store_path.string() + ": CRC32 mismatch (manifest " + std::to_string(expected_crc) +
                            ", file " + std::to_string(actual_crc) + ")");
    }

    const std::uint64_t per_record = ds.config.seq_len * kNumFeatures;
    std::uint64_t next = 0;
    for (const json& jr : m.at("records")) {
      const auto offset = jr.at("offset").get<std::uint64_t>();
      const auto length = jr.at("length").get<std::uint64_t>();
      if (length != per_record || offset != next || offset + length > values) {
        throw FormatError(FormatError::Kind::Schema, 0,
                          where + "record at offset " + std::to_string(offset) + " has an invalid extent");
      }
      next = offset + length;
      Record r;
      const int label = jr.at("label").get<int>();
      if (label != 0 && label != 1) throw FormatError(FormatError::Kind::Schema, 0, where + "label must be 0 or 1");
      r.label = static_cast<Hypothesis>(label);
      r.snr_db = jr.at("snr_db").get<double>();
      r.instance = jr.at("instance").get<std::uint64_t>();
      r.features.resize(ds.config.seq_len);
      for (std::size_t t = 0; t < ds.config.seq_len; ++t) {
        for (std::size_t k = 0; k < kNumFeatures; ++k) {
          const std::size_t at = static_cast<std::size_t>(offset + t * kNumFeatures + k) * 8;
          std::uint64_t bits = 0;
          for (std::size_t b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(store[at + b]) << (8 * b);
          r.features[t].u[k] = std::bit_cast<double>(bits);
        }
      }
      switch (split_from(jr.at("split").get<std::string>())) {
        case Split::Train: ds.train.push_back(std::move(r)); break;
        case Split::Validation: ds.validation.push_back(std::move(r)); break;
        case Split::Test: ds.test.push_back(std::move(r)); break;
      }
    }
    if (next != values) {
      throw FormatError(FormatError::Kind::Schema, 0, where + "records do not cover the feature store");
    }
    return ds;
  } catch (const json::exception& e) {
    throw FormatError(FormatError::Kind::Schema, 0, where + "manifest schema error: " + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatError::Kind::Schema, 0, where + e.what());
  }
}

}  // namespace specsense
