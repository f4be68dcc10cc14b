#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "specsense/features.hpp"
#include "specsense/rng.hpp"
#include "specsense/signal.hpp"

namespace specsense {

/// Gate blocks are stacked in this order inside LstmParams.
enum class Gate : int { Forget = 0, Candidate = 1, Input = 2, Output = 3 };

/// 4(h*i + h + h^2): input weights, biases and recurrent weights of the four gates.
std::size_t param_count(std::size_t hidden, std::size_t input);

/// Weights of a single LSTM layer. The four gates are stacked row-wise,
/// each block h rows tall, so one matrix product evaluates every gate.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Eigen::MatrixXd Wx;  ///< 4h x i
  Eigen::MatrixXd Wh;  ///< 4h x h
  Eigen::VectorXd b;   ///< 4h

  LstmParams() = default;
  LstmParams(std::size_t input, std::size_t hidden);  ///< zero-initialized

  auto wx(Gate g) { return Wx.middleRows(row(g), rows()); }
  auto wx(Gate g) const { return Wx.middleRows(row(g), rows()); }
  auto wh(Gate g) { return Wh.middleRows(row(g), rows()); }
  auto wh(Gate g) const { return Wh.middleRows(row(g), rows()); }
  auto bias(Gate g) { return b.segment(row(g), rows()); }
  auto bias(Gate g) const { return b.segment(row(g), rows()); }

  std::size_t scalar_count() const noexcept {
    return static_cast<std::size_t>(Wx.size() + Wh.size() + b.size());
  }
  bool all_finite() const noexcept { return Wx.allFinite() && Wh.allFinite() && b.allFinite(); }

 private:
  Eigen::Index rows() const { return static_cast<Eigen::Index>(hidden_dim); }
  Eigen::Index row(Gate g) const { return static_cast<int>(g) * rows(); }
};

/// Two-way softmax output layer over the last hidden state.
struct DenseHead {
  Eigen::MatrixXd W;  ///< 2 x h
  Eigen::Vector2d b = Eigen::Vector2d::Zero();

  explicit DenseHead(std::size_t hidden = 0) : W(Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(hidden))) {}
};

/// LSTM layer plus dense head: the full set of trainable parameters.
struct LstmNetwork {
  LstmParams lstm;
  DenseHead head;

  LstmNetwork() = default;
  LstmNetwork(std::size_t input, std::size_t hidden) : lstm(input, hidden), head(hidden) {}

  std::size_t input_dim() const noexcept { return lstm.input_dim; }
  std::size_t hidden_dim() const noexcept { return lstm.hidden_dim; }
  std::size_t scalar_count() const noexcept {
    return lstm.scalar_count() + static_cast<std::size_t>(head.W.size() + head.b.size());
  }
};

/// Glorot-uniform weights per matrix, zero biases except forget bias = 1.
LstmNetwork init_network(std::size_t input, std::size_t hidden, std::uint64_t seed);

/// Flat parameter vector (internal order) and its inverse; used by the optimizer.
std::vector<double> flatten(const LstmNetwork& net);
void unflatten(std::span<const double> flat, LstmNetwork& net);

struct LstmState {
  Eigen::VectorXd s;  ///< cell state
  Eigen::VectorXd h;  ///< output

  static LstmState zeros(std::size_t hidden) {
    const auto n = static_cast<Eigen::Index>(hidden);
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }
};

/// Transient gate activations of one step.
struct GateActivations {
  Eigen::VectorXd forget, candidate, input, output;
};

/// One LSTM cell update:
///   f = sig(Wfx x + Wfh h + bf), c = tanh(...), i = sig(...),
///   s = f*s_prev + i*c, o = sig(...), h = o*tanh(s).
LstmState lstm_step(const LstmParams& params, std::span<const double> x, const LstmState& prev,
                    GateActivations* gates = nullptr);

/// Class opinions; sum to 1.
struct Posterior {
  double h0 = 0.5;
  double h1 = 0.5;
};

/// Runs the sequence from a zero state and classifies the last output.
/// With `rng` set (training mode) inverted dropout is applied to h_T.
Posterior forward(const LstmNetwork& net, std::span<const FeatureVector> seq, double dropout_rate = 0.0,
                  Rng* rng = nullptr);

/// Logit difference z_H1 - z_H0 in inference mode; monotone in d_H1 and
/// free of saturation ties, so it is the natural ROC statistic.
double logit_margin(const LstmNetwork& net, std::span<const FeatureVector> seq);

struct Example {
  std::span<const FeatureVector> seq;
  Hypothesis label;
};

struct LossAndGradients {
  double loss = 0.0;
  LstmNetwork grad;
};

/// Mean cross-entropy over the batch and its gradient via backpropagation through time.
LossAndGradients loss_and_gradients(const LstmNetwork& net, std::span<const Example> batch,
                                    double dropout_rate = 0.0, Rng* rng = nullptr);

/// Central-difference check of loss_and_gradients on a random network with
/// `batch` random sequences of length `seq_len`; returns the max relative error.
double grad_check(std::size_t hidden, std::size_t input, std::size_t seq_len, std::uint64_t seed,
                  double eps, std::size_t batch = 3);

}  // namespace specsense
