#pragma once

#include <cstdint>
#include <vector>

#include "specsense/dataset.hpp"
#include "specsense/lstm.hpp"

namespace specsense {

struct TrainHyperparams {
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double dropout_rate = 0.1;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const TrainHyperparams&, const TrainHyperparams&) = default;
};

struct EpochLog {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double validation_accuracy = 0.0;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

/// Network snapshot from the epoch with the best validation accuracy,
/// together with the normalizer its inputs expect.
struct TrainedModel {
  LstmNetwork net;
  Normalizer normalizer;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;

  /// Posterior for a raw (unnormalized) feature sequence.
  Posterior predict(const FeatureSequence& raw) const;
  /// z_H1 - z_H0 for a raw feature sequence.
  double margin(const FeatureSequence& raw) const;
};

/// Fraction of records whose arg-max class equals the label.
double accuracy(const LstmNetwork& net, const Normalizer& normalizer, const std::vector<Record>& records);

/// Mini-batch Adam on the train split, one validation pass per epoch,
/// keeps the best-validation parameters (earliest epoch on ties).
/// Throws DivergenceError when the loss turns non-finite.
TrainedModel train(const LabeledDataset& dataset, const TrainHyperparams& hp, std::size_t hidden,
                   std::size_t input = kNumFeatures);

}  // namespace specsense
