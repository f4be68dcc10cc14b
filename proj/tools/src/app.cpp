#include "specsense_cli/app.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <functional>
#include <map>

#include "specsense_cli/commands.hpp"

namespace specsense::cli {

namespace {

using Command = void (*)(const RunConfig&, const CommandInputs&, std::ostream&);

struct GlobalOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> threads;
};

RunConfig resolve(const GlobalOptions& g) {
  RunConfig cfg;
  if (!g.config_path.empty()) apply_config_file(cfg, g.config_path);
  if (const char* env = std::getenv("SPECSENSE_SEED"); env != nullptr && *env != '\0') {
    try {
      apply_override(cfg, std::string("run.seed=") + env);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("SPECSENSE_SEED: ") + e.what());
    }
  }
  for (const auto& o : g.overrides) apply_override(cfg, o);
  if (g.seed) cfg.seed = *g.seed;
  if (g.output_dir) cfg.output_dir = *g.output_dir;
  if (g.threads) cfg.threads = *g.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"specsense: LSTM spectrum sensing simulator and detector evaluation", "specsense"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "Config file (TOML-style sections, see docs/config.md)");
  app.add_option("--set", g.overrides, "Override one setting, section.key=value (repeatable)");
  app.add_option("--seed", g.seed, "Master seed (overrides run.seed and SPECSENSE_SEED)");
  app.add_option("-o,--out", g.output_dir, "Output directory (overrides run.output_dir)");
  app.add_option("--threads", g.threads, "Worker threads, 0 = all cores; results do not depend on it");

  CommandInputs in;
  std::map<CLI::App*, Command> commands;
  const auto add = [&](const char* name, const char* help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands[sub] = fn;
    return sub;
  };

  add("simulate", "Simulate a labeled dataset into the output directory", cmd_simulate);

  auto* train = add("train", "Train the LSTM (and baselines) on a saved dataset", cmd_train);
  train->add_option("--dataset", in.dataset_dir, "Dataset directory")->required();

  auto* eval = add("eval", "Per-SNR test accuracy of trained models (acc.csv)", cmd_eval);
  eval->add_option("--dataset", in.dataset_dir, "Dataset directory")->required();
  eval->add_option("--model", in.model, "LSTM model file");
  eval->add_option("--gnb", in.gnb_model, "Gaussian naive Bayes model file");
  eval->add_option("--mlp", in.mlp_model, "MLP model file");

  auto* roc = add("roc", "ROC of one detector at eval.roc_snr_db (roc.csv)", cmd_roc);
  roc->add_option("--dataset", in.dataset_dir, "Dataset directory (needed for learned detectors)");
  roc->add_option("--model", in.model, "LSTM model file");
  roc->add_option("--gnb", in.gnb_model, "Gaussian naive Bayes model file");
  roc->add_option("--mlp", in.mlp_model, "MLP model file");
  roc->add_option("--detector", in.detector, "energy, llr, gof, mme, lstm, gnb or mlp (overrides eval.roc_detector)");

  auto* sweep = add("sweep", "Pd versus SNR for eval.detectors and eval.frame_lengths (sweep.csv)", cmd_sweep);
  sweep->add_option("--dataset", in.dataset_dir, "Dataset directory (needed for learned detectors)");
  sweep->add_option("--model", in.model, "LSTM model file");
  sweep->add_option("--gnb", in.gnb_model, "Gaussian naive Bayes model file");
  sweep->add_option("--mlp", in.mlp_model, "MLP model file");

  auto* acf = add("autocorr", "Normalized autocorrelation of an IQ file or of the primary (acf.csv)", cmd_autocorr);
  acf->add_option("--input", in.input, "SPIQ file; omitted = synthesize iq.samples primary samples");
  acf->add_option("--max-lag", in.max_lag, "Largest lag (overrides eval.acf_max_lag)");

  auto* imp = add("import-iq", "Convert headerless interleaved f32 IQ into a SPIQ file", cmd_import_iq);
  imp->add_option("--input", in.input, "Raw f32 IQ file")->required();
  imp->add_option("--output", in.output, "SPIQ file to write")->required();

  auto* exp = add("export-iq", "Write a synthesized received signal at iq.snr_db as a SPIQ file", cmd_export_iq);
  exp->add_option("--output", in.output, "SPIQ file to write")->required();
  exp->add_flag("--noise-only", in.noise_only, "Write noise only (H0)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const RunConfig cfg = resolve(g);
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) {
        fn(cfg, in, out);
        return kExitOk;
      }
    }
    return kExitValidation;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace specsense::cli
