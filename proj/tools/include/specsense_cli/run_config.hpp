#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "specsense/baselines.hpp"
#include "specsense/dataset.hpp"
#include "specsense/error.hpp"
#include "specsense/iq_file.hpp"
#include "specsense/pipeline.hpp"
#include "specsense/signal.hpp"
#include "specsense/train.hpp"

namespace specsense::cli {

struct EvalSettings {
  std::vector<double> snr_grid_db = {-20, -18, -16, -14, -12, -10, -8, -6, -4, -2, 0};
  std::vector<std::size_t> frame_lengths = {100, 1000};
  std::size_t trials = 1000;
  std::size_t calibration_trials = 0;
  double target_pf = 0.1;
  std::vector<std::string> detectors = {"energy", "mme", "gof"};
  std::string roc_detector = "energy";
  double roc_snr_db = -10.0;
  std::size_t roc_points = 101;
  std::size_t roc_trials = 2000;
  double lstm_threshold = 0.5;
  std::size_t acf_max_lag = 50;
};

struct IqSettings {
  std::size_t samples = 100000;
  double snr_db = 10.0;
  IqFormat format = IqFormat::F32;
  double center_freq_hz = 0.0;
  double raw_sample_rate_hz = 228000.0;
};

/// Everything a run needs. Defaults are the desk-scale setup.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "run";
  std::size_t threads = 0;  ///< 0 = all hardware threads

  DatasetConfig dataset;
  ChannelConfig channel;
  PrimaryConfig primary;
  FeatureConfig features;

  std::size_t hidden = 25;
  std::size_t input = kNumFeatures;
  TrainHyperparams train;
  bool train_baselines = true;
  double gnb_var_smoothing = 1e-8;
  std::size_t mlp_hidden = 25;
  std::size_t mlp_epochs = 20;

  EvalSettings eval;
  IqSettings iq;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
  /// Dataset config with the master seed applied.
  DatasetConfig dataset_config() const;
  TrainHyperparams train_hyperparams() const;
  MlpTrainConfig mlp_config() const;
  std::size_t worker_threads() const;
};

/// Config syntax error with file and line, reported as a validation error.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Applies the assignments in a config file on top of `cfg`.
/// Grammar (docs/config.md):
///   line    := [ "[" section "]" | key "=" value ] [ "#" comment ]
///   value   := integer | real | "string" | true | false | "[" [ scalar { "," scalar } ] "]"
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Applies one "section.key=value" override. Strings may be unquoted.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Every field in the config-file grammar, one per line, grouped by section.
std::string render_config(const RunConfig& cfg);

/// Names of all settable keys ("section.key").
std::vector<std::string> config_keys();

}  // namespace specsense::cli
