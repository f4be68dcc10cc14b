#include <algorithm>
#include <cmath>

#include "specsense/baselines.hpp"
#include "specsense/error.hpp"
#include "specsense/optimizer.hpp"
#include "specsense/rng.hpp"

namespace specsense {

namespace {

Eigen::Vector2d softmax(const Eigen::Vector2d& z) {
  const double m = z.maxCoeff();
  const double e0 = std::exp(z(0) - m);
  const double e1 = std::exp(z(1) - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace

MlpModel::MlpModel(std::size_t input, std::size_t hidden)
    : W1(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(input))),
      b1(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden))),
      W2(Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(hidden))) {
  require(input >= 1 && hidden >= 1, "MlpModel: dimensions must be >= 1");
}

std::vector<double> flatten(const MlpModel& m) {
  std::vector<double> out;
  out.reserve(m.scalar_count());
  auto push = [&out](const auto& t) { out.insert(out.end(), t.data(), t.data() + t.size()); };
  push(m.W1);
  push(m.b1);
  push(m.W2);
  push(m.b2);
  return out;
}

void unflatten(std::span<const double> flat, MlpModel& m) {
  require(flat.size() == m.scalar_count(), "unflatten: size mismatch");
  std::size_t pos = 0;
  auto pull = [&](auto& t) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), t.size(), t.data());
    pos += static_cast<std::size_t>(t.size());
  };
  pull(m.W1);
  pull(m.b1);
  pull(m.W2);
  pull(m.b2);
}

Posterior mlp_predict(const MlpModel& model, const FeatureVector& x) {
  Eigen::Map<const Eigen::Vector4d> in(x.u.data());
  const Eigen::VectorXd a = (model.W1 * in + model.b1).array().tanh().matrix();
  const Eigen::Vector2d p = softmax(model.W2 * a + model.b2);
  return {p(0), p(1)};
}

MlpLossAndGradients mlp_loss_and_gradients(const MlpModel& model, std::span<const FeatureVector> x,
                                           std::span<const Hypothesis> y) {
  require(!x.empty(), "mlp_loss_and_gradients: empty batch");
  require(x.size() == y.size(), "mlp_loss_and_gradients: feature/label count mismatch");
  MlpLossAndGradients out;
  out.grad = MlpModel(kNumFeatures, model.hidden_dim());
  const double scale = 1.0 / static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::Map<const Eigen::Vector4d> in(x[k].u.data());
    const Eigen::VectorXd a = (model.W1 * in + model.b1).array().tanh().matrix();
    const Eigen::Vector2d p = softmax(model.W2 * a + model.b2);
    const int c = label_of(y[k]);
    out.loss -= std::log(std::max(p(c), 1e-300)) * scale;

    Eigen::Vector2d dz = p;
    dz(c) -= 1.0;
    dz *= scale;
    out.grad.W2.noalias() += dz * a.transpose();
    out.grad.b2 += dz;
    const Eigen::VectorXd da = (model.W2.transpose() * dz).cwiseProduct((1.0 - a.array().square()).matrix());
    out.grad.W1.noalias() += da * in.transpose();
    out.grad.b1 += da;
  }
  return out;
}

MlpModel mlp_fit(std::span<const FeatureVector> x, std::span<const Hypothesis> y, const MlpTrainConfig& cfg) {
  require(!x.empty() && x.size() == y.size(), "mlp_fit: need matching non-empty features and labels");
  require(cfg.hidden >= 1 && cfg.epochs >= 1 && cfg.batch_size >= 1, "mlp_fit: invalid configuration");

  Rng init(derive_seed(cfg.seed, 1, StreamRole::Init));
  MlpModel m(kNumFeatures, cfg.hidden);
  const double h = static_cast<double>(cfg.hidden);
  const double b1 = std::sqrt(6.0 / (h + static_cast<double>(kNumFeatures)));
  const double b2 = std::sqrt(6.0 / (h + 2.0));
  for (Eigen::Index i = 0; i < m.W1.size(); ++i) m.W1.data()[i] = (2.0 * init.uniform() - 1.0) * b1;
  for (Eigen::Index i = 0; i < m.W2.size(); ++i) m.W2.data()[i] = (2.0 * init.uniform() - 1.0) * b2;

  std::vector<double> params = flatten(m);
  Adam adam(params.size(), {cfg.learning_rate, 0.9, 0.999, 1e-8});
  Rng shuffle(derive_seed(cfg.seed, 1, StreamRole::Shuffle));
  std::vector<std::size_t> order(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;

  std::vector<FeatureVector> bx;
  std::vector<Hypothesis> by;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(start + cfg.batch_size, order.size());
      bx.clear();
      by.clear();
      for (std::size_t k = start; k < stop; ++k) {
        bx.push_back(x[order[k]]);
        by.push_back(y[order[k]]);
      }
      const MlpLossAndGradients lg = mlp_loss_and_gradients(m, bx, by);
      if (!std::isfinite(lg.loss)) throw DivergenceError("mlp_fit: loss became non-finite");
      adam.step(params, flatten(lg.grad));
      unflatten(params, m);
    }
  }
  return m;
}

double mlp_grad_check(std::size_t hidden, std::uint64_t seed, double eps, std::size_t batch) {
  require(eps > 0.0, "mlp_grad_check: eps must be > 0");
  Rng rng(seed);
  MlpModel m(kNumFeatures, hidden);
  std::vector<double> flat(m.scalar_count());
  for (auto& w : flat) w = rng.uniform() - 0.5;
  unflatten(flat, m);
  std::vector<FeatureVector> x(batch);
  std::vector<Hypothesis> y(batch);
  for (std::size_t k = 0; k < batch; ++k) {
    for (auto& u : x[k].u) u = rng.normal();
    y[k] = k % 2 == 0 ? Hypothesis::H1 : Hypothesis::H0;
  }
  const std::vector<double> analytic = flatten(mlp_loss_and_gradients(m, x, y).grad);
  double worst = 0.0;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const double saved = flat[k];
    flat[k] = saved + eps;
    unflatten(flat, m);
    const double up = mlp_loss_and_gradients(m, x, y).loss;
    flat[k] = saved - eps;
    unflatten(flat, m);
    const double down = mlp_loss_and_gradients(m, x, y).loss;
    flat[k] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  return worst;
}

}  // namespace specsense
