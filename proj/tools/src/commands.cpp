#include "specsense_cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>

#include "specsense/dataset_store.hpp"
#include "specsense/eval.hpp"
#include "specsense/model_io.hpp"
#include "specsense/results.hpp"

namespace specsense::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_output_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create output directory: " + ec.message());
  std::ofstream out(dir / "resolved.cfg", std::ios::binary | std::ios::trunc);
  out << render_config(cfg);
  if (!out) throw IoError((dir / "resolved.cfg").string(), "cannot write resolved config");
  return dir;
}

template <typename Table>
void write_table(const Table& t, const fs::path& dir, const std::string& stem) {
  write_results(t, dir / (stem + ".csv"), ResultFormat::Csv);
  write_results(t, dir / (stem + ".dat"), ResultFormat::Gnuplot);
}

LabeledDataset require_dataset(const CommandInputs& in) {
  if (in.dataset_dir.empty()) throw InvalidArgument("--dataset is required");
  if (!fs::exists(in.dataset_dir / kManifestFile)) {
    throw IoError((in.dataset_dir / kManifestFile).string(), "dataset manifest not found");
  }
  return load_dataset(in.dataset_dir);
}

/// Channel, primary and feature settings: the dataset's when one is given.
GenerationInfo generation_of(const RunConfig& cfg, const std::optional<LabeledDataset>& ds) {
  if (ds) return ds->generation;
  return {cfg.channel, cfg.primary, cfg.features};
}

std::vector<FeatureVector> normalized_frames(const std::vector<Record>& records, const Normalizer& n,
                                             std::vector<Hypothesis>& labels) {
  std::vector<FeatureVector> x;
  labels.clear();
  for (const Record& r : records) {
    for (const FeatureVector& v : r.features) {
      x.push_back(n.apply(v));
      labels.push_back(r.label);
    }
  }
  return x;
}

DecodedModel load_kind(const fs::path& path, ModelKind kind, const char* what) {
  DecodedModel m = load_model(path);
  if (m.kind != kind) {
    throw FormatError(FormatError::Kind::Schema, 6, path.string() + ": not a " + std::string(what) + " model file");
  }
  return m;
}

/// Detector objects for a sweep or ROC, with shared feature front ends.
class DetectorSet {
 public:
  /// Without `requested` frame lengths, the dataset's N (or the first
  /// eval.frame_lengths entry) is used.
  DetectorSet(const RunConfig& cfg, const CommandInputs& in, const std::vector<std::string>& names,
              std::optional<std::vector<std::size_t>> requested)
      : cfg_(cfg) {
    const bool needs_models = std::any_of(names.begin(), names.end(), [](const std::string& n) {
      return n == "lstm" || n == "gnb" || n == "mlp";
    });
    if (needs_models || !in.dataset_dir.empty()) dataset_ = require_dataset(in);
    gen_ = generation_of(cfg, dataset_);
    frame_lengths_ = requested.value_or(
        std::vector<std::size_t>{dataset_ ? dataset_->config.frame_len : cfg.eval.frame_lengths.front()});
    const auto& frame_lengths = frame_lengths_;
    const NoiseModel noise(gen_.channel.noise_variance);

    for (const std::string& name : names) {
      if (name == "energy") {
        owned_.push_back(std::make_unique<EnergySweepDetector>(noise));
      } else if (name == "mme") {
        owned_.push_back(std::make_unique<MmeSweepDetector>(gen_.features.smoothing_L));
      } else if (name == "gof") {
        owned_.push_back(std::make_unique<GofSweepDetector>(noise));
      } else if (name == "llr") {
        std::map<std::size_t, std::shared_ptr<const FeatureExtractor>> per_N;
        for (std::size_t N : frame_lengths) per_N[N] = extractor(N);
        owned_.push_back(std::make_unique<LlrSweepDetector>(std::move(per_N)));
      } else {
        const std::size_t N = dataset_->config.frame_len;
        for (std::size_t n : frame_lengths) {
          if (n != N) {
            throw InvalidArgument("eval.frame_lengths: the " + name + " model was trained for N = " +
                                  std::to_string(N) + " only");
          }
        }
        const SequenceFrontEnd fe{extractor(N), dataset_->config.seq_len};
        if (name == "lstm") {
          if (in.model.empty()) throw InvalidArgument("detector lstm needs --model");
          std::map<std::size_t, std::pair<SequenceFrontEnd, TrainedModel>> per_N;
          per_N[N] = {fe, load_lstm_model(in.model)};
          owned_.push_back(std::make_unique<LstmSweepDetector>("lstm", std::move(per_N)));
        } else if (name == "gnb") {
          if (in.gnb_model.empty()) throw InvalidArgument("detector gnb needs --gnb");
          auto m = std::make_shared<DecodedModel>(load_kind(in.gnb_model, ModelKind::Gnb, "GNB"));
          std::map<std::size_t, FrameClassifierSweepDetector::Entry> per_N;
          per_N[N] = {fe, m->normalizer, [m](const FeatureVector& v) { return gnb_predict(m->gnb, v); }};
          owned_.push_back(std::make_unique<FrameClassifierSweepDetector>("gnb", std::move(per_N)));
        } else {
          if (in.mlp_model.empty()) throw InvalidArgument("detector mlp needs --mlp");
          auto m = std::make_shared<DecodedModel>(load_kind(in.mlp_model, ModelKind::Mlp, "MLP"));
          std::map<std::size_t, FrameClassifierSweepDetector::Entry> per_N;
          per_N[N] = {fe, m->normalizer, [m](const FeatureVector& v) { return mlp_predict(m->mlp, v); }};
          owned_.push_back(std::make_unique<FrameClassifierSweepDetector>("mlp", std::move(per_N)));
        }
      }
    }
  }

  std::vector<const SweepDetector*> pointers() const {
    std::vector<const SweepDetector*> out;
    for (const auto& d : owned_) out.push_back(d.get());
    return out;
  }
  const GenerationInfo& generation() const { return gen_; }
  const std::vector<std::size_t>& frame_lengths() const { return frame_lengths_; }

 private:
  std::shared_ptr<const FeatureExtractor> extractor(std::size_t N) {
    auto& slot = extractors_[N];
    if (!slot) {
      const std::uint64_t master = dataset_ ? dataset_->config.master_seed : cfg_.seed;
      slot = std::make_shared<const FeatureExtractor>(
          build_feature_extractor(gen_.primary, gen_.channel, gen_.features, N, calibration_seed(master)));
    }
    return slot;
  }

  const RunConfig& cfg_;
  std::optional<LabeledDataset> dataset_;
  GenerationInfo gen_;
  std::vector<std::size_t> frame_lengths_;
  std::map<std::size_t, std::shared_ptr<const FeatureExtractor>> extractors_;
  std::vector<std::unique_ptr<SweepDetector>> owned_;
};

}  // namespace

void cmd_simulate(const RunConfig& cfg, const CommandInputs& /*in*/, std::ostream& log) {
  const fs::path dir = prepare_output_dir(cfg);
  const LabeledDataset ds =
      make_dataset(cfg.dataset_config(), cfg.channel, cfg.primary, cfg.features, cfg.worker_threads());
  save_dataset(ds, dir);
  for (Split s : {Split::Train, Split::Validation, Split::Test}) {
    std::size_t h0 = 0;
    std::size_t h1 = 0;
    for (const Record& r : ds.split(s)) (r.label == Hypothesis::H1 ? h1 : h0) += 1;
    log << to_string(s) << ": " << ds.split(s).size() << " records (H0 " << h0 << ", H1 " << h1 << ")\n";
  }
  log << "dataset written to " << dir.string() << "\n";
}

void cmd_train(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  const LabeledDataset ds = require_dataset(in);
  const fs::path dir = prepare_output_dir(cfg);

  TrainedModel model;
  try {
    model = train(ds, cfg.train_hyperparams(), cfg.hidden, cfg.input);
  } catch (const DivergenceError& e) {
    throw DivergenceError(std::string(e.what()) + " (try a smaller train.learning_rate)");
  }
  save_model(dir / "model.lstm", encode_lstm_model(model.net, model.normalizer));
  write_table(model.log, dir, "train_log");
  const auto& best = model.log.at(model.best_epoch - 1);
  log << "lstm: best epoch " << model.best_epoch << " of " << model.log.size() << ", validation accuracy "
      << format_real(best.validation_accuracy) << "\n";

  if (cfg.train_baselines) {
    std::vector<Hypothesis> y;
    const auto x = normalized_frames(ds.train, ds.normalizer, y);
    const GnbModel gnb = gnb_fit(x, y, cfg.gnb_var_smoothing);
    save_model(dir / "model.gnb", encode_gnb_model(gnb, ds.normalizer));
    const MlpModel mlp = mlp_fit(x, y, cfg.mlp_config());
    save_model(dir / "model.mlp", encode_mlp_model(mlp, ds.normalizer));
    log << "baselines: model.gnb, model.mlp written\n";
  }
  log << "models written to " << dir.string() << "\n";
}

void cmd_eval(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  const LabeledDataset ds = require_dataset(in);
  const fs::path dir = prepare_output_dir(cfg);

  std::optional<TrainedModel> lstm;
  std::optional<DecodedModel> gnb;
  std::optional<DecodedModel> mlp;
  std::vector<NamedClassifier> models;
  if (!in.model.empty()) {
    lstm = load_lstm_model(in.model);
    models.push_back(lstm_classifier("lstm", *lstm, cfg.eval.lstm_threshold));
  }
  const double energy_t =
      energy_threshold(NoiseModel(ds.generation.channel.noise_variance), ds.config.frame_len, cfg.eval.target_pf);
  models.push_back(energy_classifier("energy", energy_t));
  if (!in.gnb_model.empty()) {
    gnb = load_kind(in.gnb_model, ModelKind::Gnb, "GNB");
    models.push_back(gnb_classifier("gnb", gnb->gnb, gnb->normalizer));
  }
  if (!in.mlp_model.empty()) {
    mlp = load_kind(in.mlp_model, ModelKind::Mlp, "MLP");
    models.push_back(mlp_classifier("mlp", mlp->mlp, mlp->normalizer));
  }
  const AccuracyTable table = accuracy_table(models, ds.test);
  write_table(table, dir, "acc");
  for (const auto& r : table) {
    log << r.model << " @ " << format_real(r.snr_db) << " dB: " << format_real(r.accuracy) << " (" << r.count
        << ")\n";
  }
}

void cmd_roc(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  const std::string name = in.detector.value_or(cfg.eval.roc_detector);
  DetectorSet set(cfg, in, {name}, std::nullopt);
  const std::size_t frame_len = set.frame_lengths().front();
  const fs::path dir = prepare_output_dir(cfg);

  const DetectorTrials trials =
      simulate_statistics(*set.pointers().front(), frame_len, cfg.eval.roc_snr_db, cfg.eval.roc_trials, cfg.seed,
                          set.generation().channel, set.generation().primary, cfg.worker_threads());
  const RocCurve curve = roc_curve(trials.h1, trials.h0, cfg.eval.roc_points);
  write_table(curve, dir, "roc");
  log << name << " ROC at " << format_real(cfg.eval.roc_snr_db) << " dB, N = " << frame_len << ": "
      << curve.size() << " points, AUC " << format_real(auc(curve)) << "\n";
}

void cmd_sweep(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  DetectorSet set(cfg, in, cfg.eval.detectors, cfg.eval.frame_lengths);
  const fs::path dir = prepare_output_dir(cfg);

  SweepConfig sc;
  sc.snr_grid_db = cfg.eval.snr_grid_db;
  sc.frame_lengths = cfg.eval.frame_lengths;
  sc.trials = cfg.eval.trials;
  sc.calibration_trials = cfg.eval.calibration_trials;
  sc.target_pf = cfg.eval.target_pf;
  sc.master_seed = cfg.seed;
  sc.threads = cfg.worker_threads();
  const auto detectors = set.pointers();
  const SweepTable table = snr_sweep(detectors, sc, set.generation().channel, set.generation().primary);
  write_table(table, dir, "sweep");
  log << "sweep: " << table.size() << " rows written to " << (dir / "sweep.csv").string() << "\n";
}

void cmd_autocorr(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  const std::size_t max_lag = in.max_lag.value_or(cfg.eval.acf_max_lag);
  const ComplexSignal signal = in.input.empty()
                                   ? synth_primary(cfg.primary, cfg.iq.samples,
                                                   derive_seed(cfg.seed, 0, StreamRole::PrimarySignal))
                                   : read_iq(in.input);
  const fs::path dir = prepare_output_dir(cfg);
  const AcfTable table{autocorrelation(signal, max_lag)};
  write_table(table, dir, "acf");
  log << "acf: rho(1) = " << format_real(table.rho.at(1)) << " over " << signal.size() << " samples\n";
}

void cmd_import_iq(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  if (in.input.empty() || in.output.empty()) throw InvalidArgument("import-iq needs --input and --output");
  const ComplexSignal signal = read_raw_f32(in.input, cfg.iq.raw_sample_rate_hz);
  const IqWriteReport r = write_iq(signal, in.output, cfg.iq.format, cfg.iq.center_freq_hz);
  log << "imported " << r.samples << " samples";
  if (r.clipped) log << " (" << r.clipped << " components clipped)";
  log << "\n";
}

void cmd_export_iq(const RunConfig& cfg, const CommandInputs& in, std::ostream& log) {
  if (in.output.empty()) throw InvalidArgument("export-iq needs --output");
  cfg.channel.validate();
  ChannelConfig ch = cfg.channel;
  ch.target_snr_db = cfg.iq.snr_db;
  const ComplexSignal s =
      synth_primary(cfg.primary, cfg.iq.samples, derive_seed(cfg.seed, 0, StreamRole::PrimarySignal));
  ComplexSignal out = apply_channel(s, ch, derive_seed(cfg.seed, 0, StreamRole::Channel));
  if (in.noise_only) {
    const ComplexSignal w =
        synth_awgn(ch.noise_variance, cfg.iq.samples, derive_seed(cfg.seed, 0, StreamRole::NoiseFrame));
    out = ComplexSignal(std::vector<cplx>(w.samples().begin(), w.samples().end()), s.sample_rate_hz());
  }
  const IqWriteReport r = write_iq(out, in.output, cfg.iq.format, cfg.iq.center_freq_hz);
  log << "exported " << r.samples << " samples to " << in.output.string();
  if (r.clipped) log << " (" << r.clipped << " components clipped)";
  log << "\n";
}

}  // namespace specsense::cli
