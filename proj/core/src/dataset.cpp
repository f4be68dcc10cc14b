#include "specsense/dataset.hpp"

#include <cmath>

#include "specsense/error.hpp"
#include "specsense/parallel.hpp"
#include "specsense/rng.hpp"

namespace specsense {

void DatasetConfig::validate() const {
  require(frame_len >= 1, "dataset.frame_len must be >= 1");
  require(seq_len >= 1, "dataset.seq_len must be >= 1");
  require(!snr_grid_db.empty(), "dataset.snr_grid_db must not be empty");
  for (double s : snr_grid_db) require(std::isfinite(s), "dataset.snr_grid_db entries must be finite");
  require(instances_per_class >= 1, "dataset.instances_per_class must be >= 1");
  double total = 0.0;
  for (double r : split_ratios) {
    require(r > 0.0, "dataset.split_ratios components must be > 0");
    total += r;
  }
  require(std::abs(total - 1.0) < 1e-9, "dataset.split_ratios must sum to 1");
}

const char* to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

const std::vector<Record>& LabeledDataset::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Validation: return validation;
    case Split::Test: return test;
  }
  return test;
}

std::array<std::size_t, 3> split_sizes(const DatasetConfig& cfg) {
  const std::size_t total = 2 * cfg.instances_per_class;
  const auto round_count = [total](double r) {
    return static_cast<std::size_t>(std::llround(r * static_cast<double>(total)));
  };
  const std::size_t n_train = std::min(round_count(cfg.split_ratios[0]), total);
  const std::size_t n_val = std::min(round_count(cfg.split_ratios[1]), total - n_train);
  return {n_train, n_val, total - n_train - n_val};
}

std::uint64_t calibration_seed(std::uint64_t master_seed) noexcept {
  return derive_seed(master_seed, 0, StreamRole::Calibration);
}

namespace {

double draw_snr(const DatasetConfig& cfg, std::uint64_t master, std::uint64_t index) {
  Rng rng(derive_seed(master, index, StreamRole::SnrDraw));
  return cfg.snr_grid_db[rng.below(cfg.snr_grid_db.size())];
}

}  // namespace

ComplexSignal simulate_received(const DatasetConfig& cfg, const ChannelConfig& channel,
                                const PrimaryConfig& primary, Hypothesis label, double snr_db,
                                std::uint64_t master_seed, std::uint64_t index) {
  const std::size_t len = cfg.frame_len * cfg.seq_len;
  if (label == Hypothesis::H0) {
    return synth_awgn(channel.noise_variance, len, derive_seed(master_seed, index, StreamRole::NoiseFrame));
  }
  const ComplexSignal s = synth_primary(primary, len, derive_seed(master_seed, index, StreamRole::PrimarySignal));
  ChannelConfig ch = channel;
  ch.target_snr_db = snr_db;
  return apply_channel(s, ch, derive_seed(master_seed, index, StreamRole::Channel));
}

LabeledDataset make_dataset(const DatasetConfig& cfg, const ChannelConfig& channel,
                            const PrimaryConfig& primary, const FeatureConfig& features,
                            std::size_t threads) {
  cfg.validate();
  const FeatureExtractor fx =
      build_feature_extractor(primary, channel, features, cfg.frame_len, calibration_seed(cfg.master_seed));
  return make_dataset(cfg, channel, primary, features, fx, threads);
}

LabeledDataset make_dataset(const DatasetConfig& cfg, const ChannelConfig& channel,
                            const PrimaryConfig& primary, const FeatureConfig& features,
                            const FeatureExtractor& extractor, std::size_t threads) {
  cfg.validate();
  channel.validate();
  primary.validate();
  features.validate();
  require(extractor.frame_len() == cfg.frame_len, "make_dataset: extractor frame length mismatch");

  const std::size_t n = cfg.instances_per_class;
  // Interleaved H0, H1 per instance so that any prefix is balanced to within one.
  std::vector<Record> records(2 * n);
  parallel_for(2 * n, threads, [&](std::size_t slot) {
    const std::uint64_t index = slot / 2;
    const Hypothesis label = slot % 2 == 0 ? Hypothesis::H0 : Hypothesis::H1;
    const double snr = draw_snr(cfg, cfg.master_seed, index);
    const ComplexSignal rx = simulate_received(cfg, channel, primary, label, snr, cfg.master_seed, index);
    Record& r = records[slot];
    r.features = extractor.extract(rx.samples(), cfg.seq_len);
    r.label = label;
    r.snr_db = snr;
    r.instance = index;
  });

  LabeledDataset ds;
  ds.config = cfg;
  ds.generation = {channel, primary, features};
  const auto sizes = split_sizes(cfg);
  auto it = records.begin();
  ds.train.assign(std::make_move_iterator(it), std::make_move_iterator(it + static_cast<std::ptrdiff_t>(sizes[0])));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  ds.validation.assign(std::make_move_iterator(it), std::make_move_iterator(it + static_cast<std::ptrdiff_t>(sizes[1])));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  ds.test.assign(std::make_move_iterator(it), std::make_move_iterator(records.end()));

  std::vector<FeatureSequence> train_features;
  train_features.reserve(ds.train.size());
  for (const auto& r : ds.train) train_features.push_back(r.features);
  require(!train_features.empty() && cfg.seq_len * train_features.size() >= 2,
          "make_dataset: training split too small to fit a normalizer");
  ds.normalizer = fit_normalizer(train_features);
  return ds;
}

}  // namespace specsense
