#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specsense/baselines.hpp"
#include "specsense/dataset.hpp"
#include "specsense/error.hpp"
#include "specsense/features.hpp"
#include "specsense/pipeline.hpp"
#include "specsense/signal.hpp"
#include "specsense/train.hpp"

namespace specsense {

/// Detection counts behind one (pd, pf) estimate.
struct PdPf {
  double pd = 0.0;
  double pf = 0.0;
  std::size_t h1_trials = 0;
  std::size_t h0_trials = 0;
  std::size_t detections = 0;    ///< H1 declared on H1 instances
  std::size_t false_alarms = 0;  ///< H1 declared on H0 instances
};

PdPf pd_pf_from_counts(std::size_t detections, std::size_t h1_trials, std::size_t false_alarms,
                       std::size_t h0_trials);

/// pd = fraction of H1 instances declared H1, pf = fraction of H0 instances declared H1.
template <typename Instance, typename Decide>
PdPf estimate_pd_pf(Decide&& decide, std::span<const Instance> h1_instances,
                    std::span<const Instance> h0_instances) {
  require(!h1_instances.empty() && !h0_instances.empty(), "estimate_pd_pf: empty instance list");
  std::size_t det = 0;
  std::size_t fa = 0;
  for (const auto& x : h1_instances) det += decide(x) == Hypothesis::H1 ? 1 : 0;
  for (const auto& x : h0_instances) fa += decide(x) == Hypothesis::H1 ? 1 : 0;
  return pd_pf_from_counts(det, h1_instances.size(), fa, h0_instances.size());
}

/// Same, for statistics already computed, with H1 declared when stat > threshold.
PdPf estimate_pd_pf(std::span<const double> h1_stats, std::span<const double> h0_stats, double threshold);

/// sqrt(p (1 - p) / n).
double binomial_sigma(double p, std::size_t n);

struct RocPoint {
  double pf = 0.0;
  double pd = 0.0;
  double threshold = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};
using RocCurve = std::vector<RocPoint>;

/// Thresholds at `num_points` quantiles of the pooled statistics, the two
/// points where the curve leaves pf = 0 and reaches pd = 1, and the
/// +inf (0, 0) and -inf (1, 1) endpoints. Ordered by decreasing threshold,
/// so pf and pd are non-decreasing along the curve.
RocCurve roc_curve(std::span<const double> h1_stats, std::span<const double> h0_stats, std::size_t num_points);

template <typename Instance, typename Statistic>
RocCurve roc_curve(Statistic&& statistic, std::span<const Instance> h1_instances,
                   std::span<const Instance> h0_instances, std::size_t num_points) {
  require(!h1_instances.empty() && !h0_instances.empty(), "roc_curve: empty instance list");
  std::vector<double> s1;
  std::vector<double> s0;
  s1.reserve(h1_instances.size());
  s0.reserve(h0_instances.size());
  for (const auto& x : h1_instances) s1.push_back(statistic(x));
  for (const auto& x : h0_instances) s0.push_back(statistic(x));
  return roc_curve(s1, s0, num_points);
}

/// Trapezoidal area under a curve returned by roc_curve.
double auc(const RocCurve& curve);

/// Normalized sample autocorrelation rho(k), k = 0..max_lag.
std::vector<double> autocorrelation(const ComplexSignal& signal, std::size_t max_lag);

// ---------------------------------------------------------------------------
// Pd-vs-SNR sweeps

/// A detector as seen by snr_sweep: a scalar statistic over one trial's
/// received samples, H1 declared when it exceeds a Pf-calibrated threshold.
class SweepDetector {
 public:
  virtual ~SweepDetector() = default;
  virtual std::string name() const = 0;
  /// Received samples consumed per trial at frame length N.
  virtual std::size_t samples_per_trial(std::size_t N) const { return N; }
  virtual double statistic(std::span<const cplx> received, std::size_t N) const = 0;
  /// Closed-form threshold for `target_pf`, if the detector has one;
  /// otherwise the sweep calibrates on Monte-Carlo noise-only trials.
  virtual std::optional<double> analytic_threshold(std::size_t /*N*/, double /*target_pf*/) const {
    return std::nullopt;
  }
};

/// Single-frame energy detector with the Gamma-quantile threshold.
class EnergySweepDetector final : public SweepDetector {
 public:
  explicit EnergySweepDetector(NoiseModel noise) : noise_(noise) {}
  std::string name() const override { return "energy"; }
  double statistic(std::span<const cplx> received, std::size_t N) const override;
  std::optional<double> analytic_threshold(std::size_t N, double target_pf) const override;

 private:
  NoiseModel noise_;
};

class MmeSweepDetector final : public SweepDetector {
 public:
  explicit MmeSweepDetector(std::size_t smoothing_L = 10) : L_(smoothing_L) {}
  std::string name() const override { return "mme"; }
  double statistic(std::span<const cplx> received, std::size_t N) const override;

 private:
  std::size_t L_;
};

class GofSweepDetector final : public SweepDetector {
 public:
  explicit GofSweepDetector(NoiseModel noise) : noise_(noise) {}
  std::string name() const override { return "gof"; }
  double statistic(std::span<const cplx> received, std::size_t N) const override;

 private:
  NoiseModel noise_;
};

/// Single-frame Gaussian LLR with one calibrated extractor per frame length.
class LlrSweepDetector final : public SweepDetector {
 public:
  explicit LlrSweepDetector(std::map<std::size_t, std::shared_ptr<const FeatureExtractor>> per_N);
  std::string name() const override { return "llr"; }
  double statistic(std::span<const cplx> received, std::size_t N) const override;

 private:
  std::map<std::size_t, std::shared_ptr<const FeatureExtractor>> per_N_;
};

/// Feature pipeline for one frame length, shared by the sequence detectors.
struct SequenceFrontEnd {
  std::shared_ptr<const FeatureExtractor> extractor;
  std::size_t seq_len = 1;
};

/// Trained LSTM over T consecutive frames; statistic is the logit margin.
class LstmSweepDetector final : public SweepDetector {
 public:
  LstmSweepDetector(std::string name, std::map<std::size_t, std::pair<SequenceFrontEnd, TrainedModel>> per_N);
  std::string name() const override { return name_; }
  std::size_t samples_per_trial(std::size_t N) const override;
  double statistic(std::span<const cplx> received, std::size_t N) const override;

 private:
  const std::pair<SequenceFrontEnd, TrainedModel>& at(std::size_t N) const;
  std::string name_;
  std::map<std::size_t, std::pair<SequenceFrontEnd, TrainedModel>> per_N_;
};

/// Per-frame classifier (GNB or MLP) averaged over T frames; statistic is the
/// mean H1 posterior.
class FrameClassifierSweepDetector final : public SweepDetector {
 public:
  using Predict = std::function<Posterior(const FeatureVector& normalized)>;
  struct Entry {
    SequenceFrontEnd front_end;
    Normalizer normalizer;
    Predict predict;
  };
  FrameClassifierSweepDetector(std::string name, std::map<std::size_t, Entry> per_N);
  std::string name() const override { return name_; }
  std::size_t samples_per_trial(std::size_t N) const override;
  double statistic(std::span<const cplx> received, std::size_t N) const override;

 private:
  const Entry& at(std::size_t N) const;
  std::string name_;
  std::map<std::size_t, Entry> per_N_;
};

struct SweepConfig {
  std::vector<double> snr_grid_db;
  std::vector<std::size_t> frame_lengths;
  std::size_t trials = 1000;              ///< H1 trials per SNR, and H0 trials for the Pf estimate
  std::size_t calibration_trials = 0;     ///< noise-only trials for empirical thresholds; 0 = trials
  double target_pf = 0.1;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
  void validate() const;
};

struct SweepRow {
  double snr_db = 0.0;
  std::size_t N = 0;
  std::string detector;
  double pd = 0.0;
  double pf = 0.0;
  std::size_t trials = 0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};
using SweepTable = std::vector<SweepRow>;

/// For each (detector, snr, N): Pd over fresh H1 trials at a threshold set
/// for cfg.target_pf, and Pf over fresh noise-only trials at that threshold.
/// Trial k reuses the same primary waveform and noise at every SNR, and
/// detectors that consume equally many samples see the same trials.
/// Rows are ordered by (detector, snr, N).
SweepTable snr_sweep(std::span<const SweepDetector* const> detectors, const SweepConfig& cfg,
                     const ChannelConfig& channel, const PrimaryConfig& primary);

/// Statistics of one detector over `trials` H1 trials at `snr_db` and as
/// many noise-only trials, drawn as in snr_sweep.
struct DetectorTrials {
  std::vector<double> h1;
  std::vector<double> h0;
};

DetectorTrials simulate_statistics(const SweepDetector& detector, std::size_t N, double snr_db,
                                   std::size_t trials, std::uint64_t master_seed, const ChannelConfig& channel,
                                   const PrimaryConfig& primary, std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Classification accuracy

struct AccuracyRow {
  std::string model;
  double snr_db = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;  ///< decisions scored
  friend bool operator==(const AccuracyRow&, const AccuracyRow&) = default;
};
using AccuracyTable = std::vector<AccuracyRow>;

/// A model maps a record to one decision (sequence models) or one per frame.
struct NamedClassifier {
  std::string name;
  std::function<std::vector<Hypothesis>(const Record&)> classify;
};

/// Per-model per-SNR fraction of correct decisions. With `snr_buckets`
/// given, every bucket must contain records; otherwise the buckets are the
/// distinct SNR tags present in `test`.
AccuracyTable accuracy_table(std::span<const NamedClassifier> models, std::span<const Record> test,
                             std::span<const double> snr_buckets = {});

/// Classifiers for trained models. LSTM decides H1 when d_H1 > threshold;
/// GNB and MLP classify every frame of the sequence.
NamedClassifier lstm_classifier(std::string name, const TrainedModel& model, double threshold = 0.5);
NamedClassifier gnb_classifier(std::string name, const GnbModel& model, const Normalizer& normalizer);
NamedClassifier mlp_classifier(std::string name, const MlpModel& model, const Normalizer& normalizer);
/// Per-frame energy decision on the raw u1 feature.
NamedClassifier energy_classifier(std::string name, double threshold);

}  // namespace specsense
