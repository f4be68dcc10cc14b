#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "specsense/features.hpp"
#include "specsense/pipeline.hpp"
#include "specsense/signal.hpp"

namespace specsense {

/// Shape and size of a simulated labeled dataset.
struct DatasetConfig {
  std::size_t frame_len = 100;  ///< N, samples per feature frame
  std::size_t seq_len = 32;     ///< T, frames per sequence
  std::vector<double> snr_grid_db = {-20, -18, -16, -14, -12, -10, -8, -6, -4, -2, 0};
  std::size_t instances_per_class = 1000;
  std::uint64_t master_seed = 1;
  std::array<double, 3> split_ratios{0.70, 0.15, 0.15};

  void validate() const;
  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

enum class Split : std::uint8_t { Train = 0, Validation = 1, Test = 2 };

const char* to_string(Split s) noexcept;

struct Record {
  FeatureSequence features;  ///< raw statistics, T x 4
  Hypothesis label = Hypothesis::H0;
  double snr_db = 0.0;        ///< SNR bucket; H0 records share their instance's draw
  std::uint64_t instance = 0;  ///< source instance index

  friend bool operator==(const Record&, const Record&) = default;
};

/// Everything needed to regenerate features for new received data.
struct GenerationInfo {
  ChannelConfig channel;
  PrimaryConfig primary;
  FeatureConfig features;

  friend bool operator==(const GenerationInfo&, const GenerationInfo&) = default;
};

/// Balanced H0/H1 sequences split into disjoint train/validation/test sets.
/// Features are stored raw; `normalizer` was fitted on the training split.
struct LabeledDataset {
  DatasetConfig config;
  GenerationInfo generation;
  std::vector<Record> train;
  std::vector<Record> validation;
  std::vector<Record> test;
  Normalizer normalizer;

  const std::vector<Record>& split(Split s) const;
  std::size_t size() const noexcept { return train.size() + validation.size() + test.size(); }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// Record counts (train, validation, test) for 2*instances_per_class records.
std::array<std::size_t, 3> split_sizes(const DatasetConfig& cfg);

/// Seed from which feature-extraction calibration for `master_seed` is drawn.
std::uint64_t calibration_seed(std::uint64_t master_seed) noexcept;

/// Simulates instances_per_class H1 and H0 sequences. H1 instance k draws
/// an SNR from the grid and passes T*N primary samples through the channel;
/// H0 instance k is T*N noise samples. Every instance has its own derived
/// seeds, so the result does not depend on `threads`.
LabeledDataset make_dataset(const DatasetConfig& cfg, const ChannelConfig& channel,
                            const PrimaryConfig& primary, const FeatureConfig& features,
                            std::size_t threads = 1);

/// Same, reusing an already calibrated extractor for cfg.frame_len.
LabeledDataset make_dataset(const DatasetConfig& cfg, const ChannelConfig& channel,
                            const PrimaryConfig& primary, const FeatureConfig& features,
                            const FeatureExtractor& extractor, std::size_t threads = 1);

/// One received sequence of T*N samples for instance `index` under `label`.
ComplexSignal simulate_received(const DatasetConfig& cfg, const ChannelConfig& channel,
                                const PrimaryConfig& primary, Hypothesis label, double snr_db,
                                std::uint64_t master_seed, std::uint64_t index);

}  // namespace specsense
