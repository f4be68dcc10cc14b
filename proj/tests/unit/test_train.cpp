#include <gtest/gtest.h>

#include <algorithm>

#include "specsense/error.hpp"
#include "specsense/train.hpp"

using namespace specsense;

namespace {

LabeledDataset dataset_at(double snr_db, std::size_t instances, std::size_t seq_len, std::uint64_t seed) {
  DatasetConfig c;
  c.frame_len = 40;
  c.seq_len = seq_len;
  c.snr_grid_db = {snr_db};
  c.instances_per_class = instances;
  c.master_seed = seed;
  FeatureConfig f;
  f.llr_calibration_frames = 200;
  return make_dataset(c, ChannelConfig{}, PrimaryConfig{}, f);
}

const LabeledDataset& high_snr() {
  static const LabeledDataset ds = dataset_at(10.0, 300, 4, 5);
  return ds;
}

const TrainedModel& high_snr_model() {
  static const TrainedModel m = [] {
    TrainHyperparams hp;
    hp.seed = 3;
    return train(high_snr(), hp, 25);
  }();
  return m;
}

}  // namespace

TEST(Train, HighSnrReachesNearPerfectValidation) {
  const auto& m = high_snr_model();
  ASSERT_EQ(m.log.size(), 20u);
  EXPECT_GE(m.log[m.best_epoch - 1].validation_accuracy, 0.99);
  EXPECT_GE(accuracy(m.net, m.normalizer, high_snr().test), 0.95);
}

TEST(Train, LossDecreases) {
  const auto& m = high_snr_model();
  EXPECT_LT(m.log.back().train_loss, m.log.front().train_loss);
}

TEST(Train, KeepsBestValidationEpoch) {
  const auto& m = high_snr_model();
  double best = 0.0;
  for (const auto& e : m.log) best = std::max(best, e.validation_accuracy);
  ASSERT_GE(m.best_epoch, 1u);
  EXPECT_EQ(m.log[m.best_epoch - 1].validation_accuracy, best);
  // First epoch attaining the maximum.
  for (std::size_t k = 0; k + 1 < m.best_epoch; ++k) EXPECT_LT(m.log[k].validation_accuracy, best);
  EXPECT_EQ(accuracy(m.net, m.normalizer, high_snr().validation), best);
  for (std::size_t k = 0; k < m.log.size(); ++k) EXPECT_EQ(m.log[k].epoch, k + 1);
}

TEST(Train, BitIdenticalAcrossRuns) {
  const auto ds = dataset_at(10.0, 60, 3, 8);
  TrainHyperparams hp;
  hp.epochs = 3;
  hp.seed = 17;
  const auto a = train(ds, hp, 6);
  const auto b = train(ds, hp, 6);
  EXPECT_EQ(flatten(a.net), flatten(b.net));
  EXPECT_EQ(a.log, b.log);
  EXPECT_EQ(a.best_epoch, b.best_epoch);
  hp.seed = 18;
  EXPECT_NE(flatten(train(ds, hp, 6).net), flatten(a.net));
}

TEST(Train, ShuffledLabelsStayNearChance) {
  auto ds = dataset_at(10.0, 1000, 2, 9);
  Rng rng(1234);
  for (auto* split : {&ds.train, &ds.validation}) {
    for (auto& r : *split) r.label = rng.below(2) == 0 ? Hypothesis::H0 : Hypothesis::H1;
  }
  TrainHyperparams hp;
  hp.epochs = 5;
  const auto m = train(ds, hp, 10);
  for (const auto& e : m.log) {
    EXPECT_GE(e.validation_accuracy, 0.4);
    EXPECT_LE(e.validation_accuracy, 0.6);
  }
}

TEST(Train, PredictAppliesStoredNormalizer) {
  const auto& m = high_snr_model();
  const auto& r = high_snr().test.front();
  const auto p = m.predict(r.features);
  const auto q = forward(m.net, m.normalizer.apply(r.features));
  EXPECT_EQ(p.h1, q.h1);
  EXPECT_EQ(m.margin(r.features) > 0.0, p.h1 > p.h0);
}

TEST(Train, RejectsBadHyperparameters) {
  const auto ds = dataset_at(10.0, 10, 2, 1);
  TrainHyperparams hp;
  hp.epochs = 0;
  EXPECT_THROW(train(ds, hp, 4), InvalidArgument);
  hp = {};
  hp.learning_rate = 0.0;
  EXPECT_THROW(train(ds, hp, 4), InvalidArgument);
  hp = {};
  hp.dropout_rate = 1.0;
  EXPECT_THROW(train(ds, hp, 4), InvalidArgument);
  EXPECT_THROW(train(ds, TrainHyperparams{}, 0), InvalidArgument);
  auto empty = ds;
  empty.validation.clear();
  EXPECT_THROW(train(empty, TrainHyperparams{}, 4), InvalidArgument);
}

TEST(Train, DivergenceIsReported) {
  const auto ds = dataset_at(10.0, 20, 2, 1);
  TrainHyperparams hp;
  hp.epochs = 2;
  hp.learning_rate = 1e308;
  EXPECT_THROW(train(ds, hp, 4), DivergenceError);
}
