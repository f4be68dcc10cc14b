#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specsense_cli/run_config.hpp"

namespace specsense::cli {

/// Paths and per-command options given on the command line.
struct CommandInputs {
  std::filesystem::path dataset_dir;
  std::filesystem::path model;      ///< LSTM model file
  std::filesystem::path gnb_model;
  std::filesystem::path mlp_model;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::string> detector;
  std::optional<std::size_t> max_lag;
  bool noise_only = false;
};

/// make_dataset + save_dataset into the output directory.
void cmd_simulate(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// Trains the LSTM (and GNB/MLP when train.baselines) on a saved dataset.
void cmd_train(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// Per-SNR test-split accuracy of the given models: acc.csv.
void cmd_eval(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// ROC of one detector at eval.roc_snr_db: roc.csv.
void cmd_roc(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// Pd-vs-SNR for eval.detectors over eval.frame_lengths: sweep.csv.
void cmd_sweep(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// Autocorrelation of an IQ file, or of a synthesized primary: acf.csv.
void cmd_autocorr(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// Headerless f32 IQ to the SPIQ container.
void cmd_import_iq(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);
/// Synthesized received signal (or noise) to the SPIQ container.
void cmd_export_iq(const RunConfig& cfg, const CommandInputs& in, std::ostream& log);

}  // namespace specsense::cli
