#include "specsense/train.hpp"

#include <cmath>

#include "specsense/error.hpp"
#include "specsense/optimizer.hpp"
#include "specsense/rng.hpp"

namespace specsense {

Adam::Adam(std::size_t size, AdamConfig cfg) : cfg_(cfg), m_(size, 0.0), v_(size, 0.0) {
  require(cfg.learning_rate > 0.0, "adam: learning_rate must be > 0");
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  require(params.size() == m_.size() && grads.size() == m_.size(), "adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * grads[k];
    v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * grads[k] * grads[k];
    const double mhat = m_[k] / c1;
    const double vhat = v_[k] / c2;
    params[k] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
  }
}

void TrainHyperparams::validate() const {
  require(epochs >= 1, "train.epochs must be >= 1");
  require(batch_size >= 1, "train.batch_size must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "train.learning_rate must be > 0");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "train.dropout_rate must be in [0, 1)");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "train.beta1/beta2 must be in [0, 1)");
  require(adam_epsilon > 0.0, "train.adam_epsilon must be > 0");
}

Posterior TrainedModel::predict(const FeatureSequence& raw) const {
  return forward(net, normalizer.apply(raw));
}

double TrainedModel::margin(const FeatureSequence& raw) const {
  return logit_margin(net, normalizer.apply(raw));
}

double accuracy(const LstmNetwork& net, const Normalizer& normalizer, const std::vector<Record>& records) {
  require(!records.empty(), "accuracy: no records");
  std::size_t correct = 0;
  for (const auto& r : records) {
    const Posterior p = forward(net, normalizer.apply(r.features));
    const Hypothesis decided = p.h1 > p.h0 ? Hypothesis::H1 : Hypothesis::H0;
    if (decided == r.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

namespace {

// Fisher-Yates with our own Rng so the order is portable.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

TrainedModel train(const LabeledDataset& dataset, const TrainHyperparams& hp, std::size_t hidden,
                   std::size_t input) {
  hp.validate();
  require(hidden >= 1, "train: hidden size must be >= 1");
  require(input == kNumFeatures, "train: input dimension must equal the feature count");
  require(!dataset.train.empty(), "train: empty training split");
  require(!dataset.validation.empty(), "train: empty validation split");

  std::vector<FeatureSequence> inputs;
  inputs.reserve(dataset.train.size());
  for (const auto& r : dataset.train) inputs.push_back(dataset.normalizer.apply(r.features));

  TrainedModel model;
  model.normalizer = dataset.normalizer;
  LstmNetwork net = init_network(input, hidden, derive_seed(hp.seed, 0, StreamRole::Init));
  std::vector<double> params = flatten(net);
  Adam adam(params.size(), {hp.learning_rate, hp.beta1, hp.beta2, hp.adam_epsilon});
  Rng shuffle_rng(derive_seed(hp.seed, 0, StreamRole::Shuffle));
  Rng dropout_rng(derive_seed(hp.seed, 0, StreamRole::Dropout));

  std::vector<std::size_t> order(inputs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;

  double best_acc = -1.0;
  std::vector<Example> batch;
  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    shuffle_indices(order, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t stop = std::min(start + hp.batch_size, order.size());
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back({inputs[order[k]], dataset.train[order[k]].label});
      }
      const LossAndGradients lg = loss_and_gradients(net, batch, hp.dropout_rate, &dropout_rng);
      if (!std::isfinite(lg.loss)) {
        throw DivergenceError("train: loss became non-finite at epoch " + std::to_string(epoch) +
                              ", batch starting at " + std::to_string(start) +
                              "; lower train.learning_rate");
      }
      loss_sum += lg.loss * static_cast<double>(stop - start);
      const std::vector<double> grads = flatten(lg.grad);
      adam.step(params, grads);
      unflatten(params, net);
    }
    if (!net.lstm.all_finite() || !net.head.W.allFinite() || !net.head.b.allFinite()) {
      throw DivergenceError("train: parameters became non-finite at epoch " + std::to_string(epoch));
    }

    const double val_acc = accuracy(net, dataset.normalizer, dataset.validation);
    model.log.push_back({epoch, loss_sum / static_cast<double>(order.size()), val_acc});
    if (val_acc > best_acc) {
      best_acc = val_acc;
      model.net = net;
      model.best_epoch = epoch;
    }
  }
  return model;
}

}  // namespace specsense
