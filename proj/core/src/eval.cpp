#include "specsense/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>

#include "specsense/parallel.hpp"
#include "specsense/rng.hpp"

namespace specsense {

PdPf pd_pf_from_counts(std::size_t detections, std::size_t h1_trials, std::size_t false_alarms,
                       std::size_t h0_trials) {
  require(h1_trials > 0 && h0_trials > 0, "estimate_pd_pf: empty instance list");
  require(detections <= h1_trials && false_alarms <= h0_trials, "estimate_pd_pf: count exceeds trials");
  PdPf out;
  out.h1_trials = h1_trials;
  out.h0_trials = h0_trials;
  out.detections = detections;
  out.false_alarms = false_alarms;
  out.pd = static_cast<double>(detections) / static_cast<double>(h1_trials);
  out.pf = static_cast<double>(false_alarms) / static_cast<double>(h0_trials);
  return out;
}

PdPf estimate_pd_pf(std::span<const double> h1_stats, std::span<const double> h0_stats, double threshold) {
  require(!h1_stats.empty() && !h0_stats.empty(), "estimate_pd_pf: empty instance list");
  const auto above = [threshold](std::span<const double> s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double v) { return v > threshold; }));
  };
  return pd_pf_from_counts(above(h1_stats), h1_stats.size(), above(h0_stats), h0_stats.size());
}

double binomial_sigma(double p, std::size_t n) {
  require(n > 0, "binomial_sigma: n must be > 0");
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

RocCurve roc_curve(std::span<const double> h1_stats, std::span<const double> h0_stats, std::size_t num_points) {
  require(num_points >= 2, "roc_curve: num_points must be >= 2");
  require(!h1_stats.empty() && !h0_stats.empty(), "roc_curve: empty instance list");

  std::vector<double> pooled(h1_stats.begin(), h1_stats.end());
  pooled.insert(pooled.end(), h0_stats.begin(), h0_stats.end());
  std::sort(pooled.begin(), pooled.end());

  std::vector<double> thresholds;
  thresholds.reserve(num_points);
  const double last = static_cast<double>(pooled.size() - 1);
  for (std::size_t i = 0; i < num_points; ++i) {
    const double q = static_cast<double>(num_points - 1 - i) / static_cast<double>(num_points - 1);
    const auto idx = static_cast<std::size_t>(std::llround(q * last));
    if (thresholds.empty() || pooled[idx] < thresholds.back()) thresholds.push_back(pooled[idx]);
  }

  std::vector<double> s1(h1_stats.begin(), h1_stats.end());
  std::vector<double> s0(h0_stats.begin(), h0_stats.end());
  std::sort(s1.begin(), s1.end());
  std::sort(s0.begin(), s0.end());

  // Where the curve leaves pf = 0 and where it first reaches pd = 1.
  thresholds.push_back(s0.back());
  const auto below_min_h1 = std::lower_bound(pooled.begin(), pooled.end(), s1.front());
  if (below_min_h1 != pooled.begin()) thresholds.push_back(*std::prev(below_min_h1));
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const auto fraction_above = [](const std::vector<double>& s, double t) {
    const auto it = std::upper_bound(s.begin(), s.end(), t);
    return static_cast<double>(s.end() - it) / static_cast<double>(s.size());
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  RocCurve curve;
  curve.reserve(thresholds.size() + 2);
  curve.push_back({0.0, 0.0, kInf});
  for (double t : thresholds) curve.push_back({fraction_above(s0, t), fraction_above(s1, t), t});
  curve.push_back({1.0, 1.0, -kInf});
  return curve;
}

double auc(const RocCurve& curve) {
  require(curve.size() >= 2, "auc: curve needs at least two points");
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += (curve[k].pf - curve[k - 1].pf) * 0.5 * (curve[k].pd + curve[k - 1].pd);
  }
  return std::abs(area);
}

std::vector<double> autocorrelation(const ComplexSignal& signal, std::size_t max_lag) {
  const auto x = signal.samples();
  require(max_lag < x.size(), "autocorrelation: max_lag must be < signal length");
  double power = 0.0;
  for (const cplx& v : x) power += std::norm(v);
  require(power > 0.0, "autocorrelation: all-zero signal");

  std::vector<double> rho(max_lag + 1);
  rho[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t n = k; n < x.size(); ++n) acc += x[n] * std::conj(x[n - k]);
    rho[k] = std::abs(acc) / power;
  }
  return rho;
}

// ---------------------------------------------------------------------------

double EnergySweepDetector::statistic(std::span<const cplx> received, std::size_t N) const {
  return energy(received.first(N));
}

std::optional<double> EnergySweepDetector::analytic_threshold(std::size_t N, double target_pf) const {
  return energy_threshold(noise_, N, target_pf);
}

double MmeSweepDetector::statistic(std::span<const cplx> received, std::size_t N) const {
  return mme_ratio(received.first(N), SmoothingConfig::for_frame(N, L_));
}

double GofSweepDetector::statistic(std::span<const cplx> received, std::size_t N) const {
  return gof_za(received.first(N), noise_);
}

LlrSweepDetector::LlrSweepDetector(std::map<std::size_t, std::shared_ptr<const FeatureExtractor>> per_N)
    : per_N_(std::move(per_N)) {
  for (const auto& [N, ex] : per_N_) {
    require(ex && ex->frame_len() == N, "LlrSweepDetector: extractor frame length does not match its key");
  }
}

double LlrSweepDetector::statistic(std::span<const cplx> received, std::size_t N) const {
  const auto it = per_N_.find(N);
  require(it != per_N_.end(), "llr: no calibrated covariance for N = " + std::to_string(N));
  return it->second->llr_evaluator()(received.first(N));
}

LstmSweepDetector::LstmSweepDetector(std::string name,
                                     std::map<std::size_t, std::pair<SequenceFrontEnd, TrainedModel>> per_N)
    : name_(std::move(name)), per_N_(std::move(per_N)) {
  for (const auto& [N, entry] : per_N_) {
    require(entry.first.extractor && entry.first.extractor->frame_len() == N,
            "LstmSweepDetector: extractor frame length does not match its key");
  }
}

const std::pair<SequenceFrontEnd, TrainedModel>& LstmSweepDetector::at(std::size_t N) const {
  const auto it = per_N_.find(N);
  require(it != per_N_.end(), name_ + ": no model for N = " + std::to_string(N));
  return it->second;
}

std::size_t LstmSweepDetector::samples_per_trial(std::size_t N) const { return N * at(N).first.seq_len; }

double LstmSweepDetector::statistic(std::span<const cplx> received, std::size_t N) const {
  const auto& [fe, model] = at(N);
  return model.margin(fe.extractor->extract(received, fe.seq_len));
}

FrameClassifierSweepDetector::FrameClassifierSweepDetector(std::string name, std::map<std::size_t, Entry> per_N)
    : name_(std::move(name)), per_N_(std::move(per_N)) {
  for (const auto& [N, entry] : per_N_) {
    require(entry.front_end.extractor && entry.front_end.extractor->frame_len() == N,
            "FrameClassifierSweepDetector: extractor frame length does not match its key");
    require(static_cast<bool>(entry.predict), "FrameClassifierSweepDetector: empty predictor");
  }
}

const FrameClassifierSweepDetector::Entry& FrameClassifierSweepDetector::at(std::size_t N) const {
  const auto it = per_N_.find(N);
  require(it != per_N_.end(), name_ + ": no model for N = " + std::to_string(N));
  return it->second;
}

std::size_t FrameClassifierSweepDetector::samples_per_trial(std::size_t N) const {
  return N * at(N).front_end.seq_len;
}

double FrameClassifierSweepDetector::statistic(std::span<const cplx> received, std::size_t N) const {
  const Entry& e = at(N);
  const FeatureSequence seq = e.front_end.extractor->extract(received, e.front_end.seq_len, &e.normalizer);
  return mean_posterior(std::span<const FeatureVector>(seq), e.predict).h1;
}

void SweepConfig::validate() const {
  require(!snr_grid_db.empty(), "sweep.snr_grid_db must not be empty");
  require(!frame_lengths.empty(), "sweep.frame_lengths must not be empty");
  for (double s : snr_grid_db) require(std::isfinite(s), "sweep.snr_grid_db entries must be finite");
  for (std::size_t N : frame_lengths) require(N >= 2, "sweep.frame_lengths entries must be >= 2");
  require(trials >= 100, "sweep.trials must be >= 100");
  require(calibration_trials == 0 || calibration_trials >= 100, "sweep.calibration_trials must be 0 or >= 100");
  require(target_pf > 0.0 && target_pf < 1.0, "sweep.target_pf must be in (0, 1)");
}

namespace {

struct DetectorStats {
  std::vector<std::vector<double>> h1;  // [snr][trial]
  std::vector<double> h0;               // Pf estimate
  std::vector<double> calibration;      // empirical threshold
  bool needs_calibration = false;
};

}  // namespace

SweepTable snr_sweep(std::span<const SweepDetector* const> detectors, const SweepConfig& cfg,
                     const ChannelConfig& channel, const PrimaryConfig& primary) {
  cfg.validate();
  channel.validate();
  primary.validate();
  require(!detectors.empty(), "snr_sweep: no detectors");
  for (const auto* d : detectors) require(d != nullptr, "snr_sweep: null detector");

  const std::size_t n_det = detectors.size();
  const std::size_t n_snr = cfg.snr_grid_db.size();
  const std::size_t n_len = cfg.frame_lengths.size();
  const std::size_t cal_trials = cfg.calibration_trials == 0 ? cfg.trials : cfg.calibration_trials;
  const std::uint64_t sweep_seed = derive_seed(cfg.master_seed, hash_label("sweep"), StreamRole::Trial);

  std::vector<ChannelConfig> channels(n_snr, channel);
  for (std::size_t j = 0; j < n_snr; ++j) channels[j].target_snr_db = cfg.snr_grid_db[j];

  // rows_by[d][snr][N]
  std::vector<std::vector<std::vector<SweepRow>>> rows_by(
      n_det, std::vector<std::vector<SweepRow>>(n_snr, std::vector<SweepRow>(n_len)));

  for (std::size_t li = 0; li < n_len; ++li) {
    const std::size_t N = cfg.frame_lengths[li];

    // Detectors consuming equally many samples share one set of trials.
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t d = 0; d < n_det; ++d) groups[detectors[d]->samples_per_trial(N)].push_back(d);

    for (const auto& [len, members] : groups) {
      require(len >= N, "snr_sweep: detector consumes fewer samples than one frame");
      const std::uint64_t base = derive_seed(sweep_seed, len, StreamRole::NoiseFrame);

      std::vector<DetectorStats> stats(members.size());
      bool any_calibration = false;
      for (std::size_t m = 0; m < members.size(); ++m) {
        stats[m].h1.assign(n_snr, std::vector<double>(cfg.trials));
        stats[m].h0.assign(cfg.trials, 0.0);
        stats[m].needs_calibration = !detectors[members[m]]->analytic_threshold(N, cfg.target_pf).has_value();
        if (stats[m].needs_calibration) {
          stats[m].calibration.assign(cal_trials, 0.0);
          any_calibration = true;
        }
      }

      parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) {
        const ComplexSignal s = synth_primary(primary, len, derive_seed(base, k, StreamRole::PrimarySignal));
        const ComplexSignal w = synth_awgn(channel.noise_variance, len, derive_seed(base, k, StreamRole::Channel));
        const auto sv = s.samples();
        const auto wv = w.samples();
        std::vector<cplx> rx(len);
        for (std::size_t j = 0; j < n_snr; ++j) {
          const double gain = calibrated_gain(s, channels[j]);
          for (std::size_t n = 0; n < len; ++n) rx[n] = gain * sv[n] + wv[n];
          for (std::size_t m = 0; m < members.size(); ++m) {
            stats[m].h1[j][k] = detectors[members[m]]->statistic(rx, N);
          }
        }
        const ComplexSignal w0 = synth_awgn(channel.noise_variance, len, derive_seed(base, k, StreamRole::Trial));
        for (std::size_t m = 0; m < members.size(); ++m) {
          stats[m].h0[k] = detectors[members[m]]->statistic(w0.samples(), N);
        }
      });

      if (any_calibration) {
        parallel_for(cal_trials, cfg.threads, [&](std::size_t k) {
          const ComplexSignal w =
              synth_awgn(channel.noise_variance, len, derive_seed(base, k, StreamRole::Threshold));
          for (std::size_t m = 0; m < members.size(); ++m) {
            if (stats[m].needs_calibration) stats[m].calibration[k] = detectors[members[m]]->statistic(w.samples(), N);
          }
        });
      }

      for (std::size_t m = 0; m < members.size(); ++m) {
        const SweepDetector& det = *detectors[members[m]];
        const double threshold = stats[m].needs_calibration
                                     ? empirical_threshold(stats[m].calibration, cfg.target_pf)
                                     : *det.analytic_threshold(N, cfg.target_pf);
        for (std::size_t j = 0; j < n_snr; ++j) {
          const PdPf r = estimate_pd_pf(stats[m].h1[j], stats[m].h0, threshold);
          rows_by[members[m]][j][li] = {cfg.snr_grid_db[j], N, det.name(), r.pd, r.pf, cfg.trials};
        }
      }
    }
  }

  SweepTable table;
  table.reserve(n_det * n_snr * n_len);
  for (const auto& by_snr : rows_by) {
    for (const auto& by_len : by_snr) table.insert(table.end(), by_len.begin(), by_len.end());
  }
  return table;
}

DetectorTrials simulate_statistics(const SweepDetector& detector, std::size_t N, double snr_db,
                                   std::size_t trials, std::uint64_t master_seed, const ChannelConfig& channel,
                                   const PrimaryConfig& primary, std::size_t threads) {
  require(trials >= 1, "simulate_statistics: trials must be >= 1");
  channel.validate();
  ChannelConfig ch = channel;
  ch.target_snr_db = snr_db;
  const std::size_t len = detector.samples_per_trial(N);
  const std::uint64_t base = derive_seed(derive_seed(master_seed, hash_label("roc"), StreamRole::Trial), len,
                                         StreamRole::NoiseFrame);
  DetectorTrials out;
  out.h1.resize(trials);
  out.h0.resize(trials);
  parallel_for(trials, threads, [&](std::size_t k) {
    const ComplexSignal s = synth_primary(primary, len, derive_seed(base, k, StreamRole::PrimarySignal));
    const ComplexSignal rx = apply_channel(s, ch, derive_seed(base, k, StreamRole::Channel));
    out.h1[k] = detector.statistic(rx.samples(), N);
    const ComplexSignal w = synth_awgn(ch.noise_variance, len, derive_seed(base, k, StreamRole::Trial));
    out.h0[k] = detector.statistic(w.samples(), N);
  });
  return out;
}

// ---------------------------------------------------------------------------

AccuracyTable accuracy_table(std::span<const NamedClassifier> models, std::span<const Record> test,
                             std::span<const double> snr_buckets) {
  require(!models.empty(), "accuracy_table: no models");
  require(!test.empty(), "accuracy_table: empty test data");

  std::vector<double> buckets(snr_buckets.begin(), snr_buckets.end());
  if (buckets.empty()) {
    for (const Record& r : test) buckets.push_back(r.snr_db);
  }
  std::sort(buckets.begin(), buckets.end());
  buckets.erase(std::unique(buckets.begin(), buckets.end()), buckets.end());

  AccuracyTable table;
  for (const NamedClassifier& model : models) {
    require(static_cast<bool>(model.classify), "accuracy_table: model \"" + model.name + "\" has no classifier");
    std::map<double, std::pair<std::size_t, std::size_t>> tally;  // snr -> (correct, total)
    for (double b : buckets) tally[b] = {0, 0};
    for (const Record& r : test) {
      const auto it = tally.find(r.snr_db);
      if (it == tally.end()) continue;
      for (Hypothesis h : model.classify(r)) {
        it->second.first += h == r.label ? 1 : 0;
        it->second.second += 1;
      }
    }
    for (const auto& [snr, counts] : tally) {
      require(counts.second > 0, "accuracy_table: no test data for SNR " + std::to_string(snr) + " dB");
      table.push_back({model.name, snr, static_cast<double>(counts.first) / static_cast<double>(counts.second),
                       counts.second});
    }
  }
  return table;
}

NamedClassifier lstm_classifier(std::string name, const TrainedModel& model, double threshold) {
  return {std::move(name), [&model, threshold](const Record& r) {
            return std::vector<Hypothesis>{model.predict(r.features).h1 > threshold ? Hypothesis::H1
                                                                                    : Hypothesis::H0};
          }};
}

NamedClassifier gnb_classifier(std::string name, const GnbModel& model, const Normalizer& normalizer) {
  return {std::move(name), [&model, &normalizer](const Record& r) {
            std::vector<Hypothesis> out;
            out.reserve(r.features.size());
            for (const FeatureVector& v : r.features) {
              const Posterior p = gnb_predict(model, normalizer.apply(v));
              out.push_back(p.h1 > p.h0 ? Hypothesis::H1 : Hypothesis::H0);
            }
            return out;
          }};
}

NamedClassifier mlp_classifier(std::string name, const MlpModel& model, const Normalizer& normalizer) {
  return {std::move(name), [&model, &normalizer](const Record& r) {
            std::vector<Hypothesis> out;
            out.reserve(r.features.size());
            for (const FeatureVector& v : r.features) {
              const Posterior p = mlp_predict(model, normalizer.apply(v));
              out.push_back(p.h1 > p.h0 ? Hypothesis::H1 : Hypothesis::H0);
            }
            return out;
          }};
}

NamedClassifier energy_classifier(std::string name, double threshold) {
  return {std::move(name), [threshold](const Record& r) {
            std::vector<Hypothesis> out;
            out.reserve(r.features.size());
            for (const FeatureVector& v : r.features) out.push_back(decide(v.energy(), threshold).declared);
            return out;
          }};
}

}  // namespace specsense
