#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "specsense/dataset_store.hpp"
#include "specsense/iq_file.hpp"
#include "specsense/model_io.hpp"
#include "specsense/results.hpp"
#include "specsense_cli/app.hpp"
#include "specsense_cli/run_config.hpp"

using namespace specsense;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSmallConfig = R"(# small run for tests
[run]
seed = 7

[dataset]
frame_len = 40
seq_len = 3
snr_grid_db = [0, 10]   # two buckets
instances_per_class = 20

[features]
llr_calibration_frames = 100

[train]
epochs = 2
mlp_epochs = 2

[eval]
snr_grid_db = [-10, -5, 0]
frame_lengths = [40]
trials = 100
roc_trials = 200
roc_points = 21
detectors = ["energy", "mme"]

[iq]
samples = 5000
)";

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("specsense_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir) {
  const auto p = dir / "small.cfg";
  std::ofstream(p) << kSmallConfig;
  return p;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string bytes_of(const fs::path& p) { return read_text(p); }

}  // namespace

// ---------------------------------------------------------------- config grammar

TEST(Config, ParsesSectionsCommentsAndLists) {
  cli::RunConfig cfg;
  cli::apply_config_text(cfg, kSmallConfig, "small.cfg");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.dataset.frame_len, 40u);
  EXPECT_EQ(cfg.dataset.snr_grid_db, (std::vector<double>{0, 10}));
  EXPECT_EQ(cfg.eval.detectors, (std::vector<std::string>{"energy", "mme"}));
  EXPECT_EQ(cfg.eval.frame_lengths, (std::vector<std::size_t>{40}));
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RenderRoundTrips) {
  cli::RunConfig a;
  cli::apply_config_text(a, kSmallConfig, "small.cfg");
  a.primary.kind = PrimaryKind::Bpsk;
  a.features.noise_mode = NoiseMode::Estimated;
  a.iq.format = IqFormat::I16;
  a.train.learning_rate = 0.0123456789;
  cli::RunConfig b;
  cli::apply_config_text(b, cli::render_config(a), "rendered");
  EXPECT_EQ(cli::render_config(b), cli::render_config(a));
  EXPECT_EQ(b.train.learning_rate, a.train.learning_rate);
  EXPECT_EQ(b.primary.kind, PrimaryKind::Bpsk);
}

TEST(Config, EveryKeyIsRendered) {
  const std::string text = cli::render_config(cli::RunConfig{});
  for (const auto& key : cli::config_keys()) {
    const auto dot = key.find('.');
    EXPECT_NE(text.find("\n" + key.substr(dot + 1) + " = "), std::string::npos) << key;
  }
}

TEST(Config, ErrorsNameTheLocation) {
  cli::RunConfig cfg;
  auto message = [&](const std::string& text) {
    try {
      cli::apply_config_text(cfg, text, "x.cfg");
    } catch (const cli::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("[run]\nseed = 1\nbogus = 2\n").find("x.cfg:3"), std::string::npos);
  EXPECT_NE(message("seed = 1\n").find("outside a [section]"), std::string::npos);
  EXPECT_NE(message("[dataset]\nframe_len = abc\n").find("dataset.frame_len"), std::string::npos);
  EXPECT_NE(message("[run\n").find("x.cfg:1"), std::string::npos);
  EXPECT_NE(message("[eval]\ndetectors = [\"energy\"\n").find("x.cfg:2"), std::string::npos);
}

TEST(Config, OverridesAcceptBareStrings) {
  cli::RunConfig cfg;
  cli::apply_override(cfg, "eval.roc_detector=gof");
  EXPECT_EQ(cfg.eval.roc_detector, "gof");
  cli::apply_override(cfg, "dataset.snr_grid_db=[-4, 4]");
  EXPECT_EQ(cfg.dataset.snr_grid_db, (std::vector<double>{-4, 4}));
  EXPECT_THROW(cli::apply_override(cfg, "dataset.frame_len"), cli::ConfigError);
  EXPECT_THROW(cli::apply_override(cfg, "nope.key=1"), cli::ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  cli::RunConfig cfg;
  cfg.dataset.instances_per_class = 0;
  try {
    cfg.validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("dataset.instances_per_class"), std::string::npos);
  }
}

TEST(Config, ShippedConfigsValidate) {
  for (const char* name : {"paper-desk.cfg", "paper-full.cfg"}) {
    SCOPED_TRACE(name);
    cli::RunConfig cfg;
    ASSERT_NO_THROW(cli::apply_config_file(cfg, fs::path(SPECSENSE_CONFIG_DIR) / name));
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.hidden, 25u);
  }
}

// ---------------------------------------------------------------- exit codes and precedence

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, cli::kExitValidation);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitValidation);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  const auto dir = fresh_dir("codes");
  const auto r = run_cli({"simulate", "-o", (dir / "x").string(), "--set", "dataset.instances_per_class=0"});
  EXPECT_EQ(r.code, cli::kExitValidation);
  EXPECT_NE(r.err.find("dataset.instances_per_class"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"train", "--dataset", (dir / "missing").string(), "-o", (dir / "m").string()}).code,
            cli::kExitRuntime);
  EXPECT_EQ(run_cli({"-c", (dir / "none.cfg").string(), "simulate"}).code, cli::kExitRuntime);
}

TEST(Cli, SeedPrecedence) {
  const auto dir = fresh_dir("seed");
  const auto cfg = write_config(dir);
  ::setenv("SPECSENSE_SEED", "99", 1);
  auto r = run_cli({"-c", cfg.string(), "-o", (dir / "a").string(), "autocorr", "--max-lag", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(bytes_of(dir / "a" / "resolved.cfg").find("seed = 99\n"), std::string::npos);
  r = run_cli({"-c", cfg.string(), "-o", (dir / "b").string(), "--seed", "5", "autocorr", "--max-lag", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(bytes_of(dir / "b" / "resolved.cfg").find("seed = 5\n"), std::string::npos);
  ::setenv("SPECSENSE_SEED", "not-a-number", 1);
  EXPECT_EQ(run_cli({"-c", cfg.string(), "-o", (dir / "c").string(), "autocorr"}).code, cli::kExitValidation);
  ::unsetenv("SPECSENSE_SEED");
  r = run_cli({"-c", cfg.string(), "-o", (dir / "d").string(), "autocorr", "--max-lag", "3"});
  EXPECT_NE(bytes_of(dir / "d" / "resolved.cfg").find("seed = 7\n"), std::string::npos);
}

// ---------------------------------------------------------------- end-to-end pipeline

class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ::unsetenv("SPECSENSE_SEED");
    root_ = new fs::path(fresh_dir("pipeline"));
    cfg_ = new fs::path(write_config(*root_));
    for (const char* run : {"r1", "r2"}) {
      const fs::path base = *root_ / run;
      ASSERT_EQ(run_cli({"-c", cfg_->string(), "-o", (base / "ds").string(), "simulate"}).code, 0);
      ASSERT_EQ(run_cli({"-c", cfg_->string(), "-o", (base / "model").string(), "train", "--dataset",
                         (base / "ds").string()})
                    .code,
                0);
    }
  }
  static void TearDownTestSuite() {
    delete root_;
    delete cfg_;
  }
  static fs::path dir(const std::string& run, const std::string& sub) { return *root_ / run / sub; }
  static fs::path* root_;
  static fs::path* cfg_;
};

fs::path* Pipeline::root_ = nullptr;
fs::path* Pipeline::cfg_ = nullptr;

TEST_F(Pipeline, SimulateIsReproducible) {
  EXPECT_TRUE(fs::exists(dir("r1", "ds") / "manifest.json"));
  EXPECT_EQ(bytes_of(dir("r1", "ds") / "manifest.json"), bytes_of(dir("r2", "ds") / "manifest.json"));
  EXPECT_EQ(bytes_of(dir("r1", "ds") / "features.bin"), bytes_of(dir("r2", "ds") / "features.bin"));
}

TEST_F(Pipeline, TrainWritesModelsAndLog) {
  for (const char* f : {"model.lstm", "model.gnb", "model.mlp", "train_log.csv", "train_log.dat"}) {
    EXPECT_TRUE(fs::exists(dir("r1", "model") / f)) << f;
    EXPECT_EQ(bytes_of(dir("r1", "model") / f), bytes_of(dir("r2", "model") / f)) << f;
  }
  EXPECT_EQ(parse_train_log_csv(bytes_of(dir("r1", "model") / "train_log.csv")).size(), 2u);
}

TEST_F(Pipeline, SingleEpochLogHasOneRow) {
  const auto out = *root_ / "one";
  const auto r = run_cli({"-c", cfg_->string(), "--set", "train.epochs=1", "--set", "train.baselines=false", "-o",
                          out.string(), "train", "--dataset", dir("r1", "ds").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "model.lstm"));
  EXPECT_FALSE(fs::exists(out / "model.gnb"));
  EXPECT_EQ(parse_train_log_csv(bytes_of(out / "train_log.csv")).size(), 1u);
}

TEST_F(Pipeline, SavedModelIsBestValidationEpoch) {
  const auto log = parse_train_log_csv(bytes_of(dir("r1", "model") / "train_log.csv"));
  const auto model = load_lstm_model(dir("r1", "model") / "model.lstm");
  const auto ds = load_dataset(dir("r1", "ds"));
  double best = 0.0;
  for (const auto& e : log) best = std::max(best, e.validation_accuracy);
  EXPECT_NEAR(accuracy(model.net, model.normalizer, ds.validation), best, 5e-6);
}

TEST_F(Pipeline, EvalWritesAccuracyPerModelAndSnr) {
  const auto out = *root_ / "eval";
  const auto m = dir("r1", "model");
  const auto r = run_cli({"-c", cfg_->string(), "-o", out.string(), "eval", "--dataset", dir("r1", "ds").string(),
                          "--model", (m / "model.lstm").string(), "--gnb", (m / "model.gnb").string(), "--mlp",
                          (m / "model.mlp").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = parse_accuracy_csv(bytes_of(out / "acc.csv"));
  ASSERT_EQ(t.size(), 4u * 2u);
  EXPECT_EQ(t[0].model, "lstm");
  for (const auto& row : t) {
    EXPECT_GE(row.accuracy, 0.0);
    EXPECT_LE(row.accuracy, 1.0);
  }
  EXPECT_EQ(run_cli({"-c", cfg_->string(), "-o", out.string(), "eval", "--dataset", dir("r1", "ds").string(),
                     "--model", (m / "model.gnb").string()})
                .code,
            cli::kExitRuntime);
}

TEST_F(Pipeline, RocEndpoints) {
  for (const char* det : {"energy", "gof", "lstm"}) {
    const auto out = *root_ / (std::string("roc_") + det);
    const auto r = run_cli({"-c", cfg_->string(), "-o", out.string(), "roc", "--detector", det, "--dataset",
                            dir("r1", "ds").string(), "--model", (dir("r1", "model") / "model.lstm").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto curve = parse_roc_csv(bytes_of(out / "roc.csv"));
    ASSERT_GE(curve.size(), 2u);
    EXPECT_EQ(curve.front().pf, 0.0);
    EXPECT_EQ(curve.front().pd, 0.0);
    EXPECT_EQ(curve.back().pf, 1.0);
    EXPECT_EQ(curve.back().pd, 1.0);
  }
}

TEST_F(Pipeline, SweepCardinalityAndReproducibility) {
  for (const char* run : {"r1", "r2"}) {
    const auto r = run_cli({"-c", cfg_->string(), "-o", dir(run, "sweep").string(), "sweep"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto t = parse_sweep_csv(bytes_of(dir("r1", "sweep") / "sweep.csv"));
  EXPECT_EQ(t.size(), 3u * 1u * 2u);
  EXPECT_EQ(bytes_of(dir("r1", "sweep") / "sweep.csv"), bytes_of(dir("r2", "sweep") / "sweep.csv"));
}

TEST_F(Pipeline, SweepWithLearnedDetectors) {
  const auto m = dir("r1", "model");
  const auto r = run_cli({"-c", cfg_->string(), "--set", "eval.detectors=[\"energy\", \"lstm\", \"gnb\", \"mlp\"]",
                          "-o", (*root_ / "sweep_learned").string(), "sweep", "--dataset", dir("r1", "ds").string(),
                          "--model", (m / "model.lstm").string(), "--gnb", (m / "model.gnb").string(), "--mlp",
                          (m / "model.mlp").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_sweep_csv(bytes_of(*root_ / "sweep_learned" / "sweep.csv")).size(), 3u * 4u);
  // Learned detectors need a model at a matching frame length.
  EXPECT_EQ(run_cli({"-c", cfg_->string(), "--set", "eval.detectors=[\"lstm\"]", "-o",
                     (*root_ / "sweep_bad").string(), "sweep", "--dataset", dir("r1", "ds").string()})
                .code,
            cli::kExitValidation);
}

TEST(CliIq, ExportThenAutocorr) {
  const auto dir = fresh_dir("iq");
  const auto cfg = write_config(dir);
  auto r = run_cli({"-c", cfg.string(), "--set", "iq.snr_db=30", "-o", (dir / "x").string(), "export-iq",
                    "--output", (dir / "fm.iq").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_iq(dir / "fm.iq").size(), 5000u);
  r = run_cli({"-c", cfg.string(), "-o", (dir / "acf").string(), "autocorr", "--input", (dir / "fm.iq").string(),
               "--max-lag", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto acf = parse_acf_csv(bytes_of(dir / "acf" / "acf.csv"));
  ASSERT_EQ(acf.rho.size(), 11u);
  EXPECT_EQ(acf.rho[0], 1.0);
  EXPECT_GT(acf.rho[1], 0.9);
  EXPECT_NE(bytes_of(dir / "acf" / "acf.csv").find("\n0,1\n"), std::string::npos);

  r = run_cli({"-c", cfg.string(), "-o", (dir / "y").string(), "export-iq", "--noise-only", "--output",
               (dir / "noise.iq").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto noise = read_iq(dir / "noise.iq");
  EXPECT_NEAR(noise.mean_power(), 1.0, 0.1);
}

TEST(CliIq, ImportRawF32) {
  const auto dir = fresh_dir("import");
  const std::vector<float> raw = {0.5f, -0.5f, 0.25f, 1.5f, -1.0f, 0.0f};
  {
    std::ofstream out(dir / "in.raw", std::ios::binary);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
  }
  const auto r = run_cli({"--set", "iq.format=i16", "-o", (dir / "o").string(), "import-iq", "--input",
                          (dir / "in.raw").string(), "--output", (dir / "out.iq").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1 components clipped"), std::string::npos) << r.out;
  const auto rec = read_iq_recording(dir / "out.iq");
  EXPECT_EQ(rec.header.format, IqFormat::I16);
  EXPECT_EQ(rec.header.sample_count, 3u);
  EXPECT_EQ(rec.header.sample_rate_hz, 228000.0);
}
