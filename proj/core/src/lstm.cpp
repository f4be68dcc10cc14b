#include "specsense/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "specsense/error.hpp"

namespace specsense {

namespace {

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& x) { return x.array().tanh().matrix(); }

Eigen::Vector2d softmax2(const Eigen::Vector2d& z) {
  const double m = z.maxCoeff();
  const double e0 = std::exp(z(0) - m);
  const double e1 = std::exp(z(1) - m);
  const double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, double bound, Rng& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
  }
}

constexpr Gate kGates[] = {Gate::Forget, Gate::Candidate, Gate::Input, Gate::Output};

// Per-step values kept for backpropagation.
struct StepCache {
  Eigen::VectorXd f, c, i, o;
  Eigen::VectorXd s, tanh_s, h;
};

struct ForwardTrace {
  std::vector<StepCache> steps;
  Eigen::VectorXd mask;  // dropout multipliers on h_T (ones when disabled)
  Eigen::Vector2d logits;
  Eigen::Vector2d prob;
};

void check_input(const LstmNetwork& net, std::span<const FeatureVector> seq) {
  require(!seq.empty(), "forward: empty sequence");
  require(net.input_dim() == kNumFeatures, "forward: network input_dim must equal the feature count");
}

ForwardTrace run(const LstmNetwork& net, std::span<const FeatureVector> seq, double dropout_rate,
                 Rng* rng, bool keep_steps) {
  check_input(net, seq);
  const auto h = static_cast<Eigen::Index>(net.hidden_dim());
  const auto& p = net.lstm;

  ForwardTrace tr;
  if (keep_steps) tr.steps.reserve(seq.size());
  Eigen::VectorXd s = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd hv = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd z(4 * h);
  for (const auto& v : seq) {
    Eigen::Map<const Eigen::Vector4d> x(v.u.data());
    z.noalias() = p.Wx * x;
    z.noalias() += p.Wh * hv;
    z += p.b;
    StepCache st;
    st.f = sigmoid(z.segment(0, h));
    st.c = tanh_vec(z.segment(h, h));
    st.i = sigmoid(z.segment(2 * h, h));
    st.o = sigmoid(z.segment(3 * h, h));
    s = st.f.cwiseProduct(s) + st.i.cwiseProduct(st.c);
    st.tanh_s = tanh_vec(s);
    hv = st.o.cwiseProduct(st.tanh_s);
    if (keep_steps) {
      st.s = s;
      st.h = hv;
      tr.steps.push_back(std::move(st));
    }
  }

  tr.mask = Eigen::VectorXd::Ones(h);
  if (rng != nullptr && dropout_rate > 0.0) {
    const double keep = 1.0 - dropout_rate;
    for (Eigen::Index k = 0; k < h; ++k) tr.mask(k) = rng->uniform() < dropout_rate ? 0.0 : 1.0 / keep;
  }
  const Eigen::VectorXd h_out = hv.cwiseProduct(tr.mask);
  tr.logits = net.head.W * h_out + net.head.b;
  tr.prob = softmax2(tr.logits);
  return tr;
}

void zero_like(LstmNetwork& g, const LstmNetwork& net) {
  g = LstmNetwork(net.input_dim(), net.hidden_dim());
}

}  // namespace

std::size_t param_count(std::size_t hidden, std::size_t input) {
  return 4 * (hidden * input + hidden + hidden * hidden);
}

LstmParams::LstmParams(std::size_t input, std::size_t hidden)
    : input_dim(input),
      hidden_dim(hidden),
      Wx(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(4 * hidden), static_cast<Eigen::Index>(input))),
      Wh(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(4 * hidden), static_cast<Eigen::Index>(hidden))),
      b(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(4 * hidden))) {
  require(input >= 1 && hidden >= 1, "LstmParams: dimensions must be >= 1");
}

LstmNetwork init_network(std::size_t input, std::size_t hidden, std::uint64_t seed) {
  LstmNetwork net(input, hidden);
  Rng rng(seed);
  const double hi = static_cast<double>(hidden);
  const double in = static_cast<double>(input);
  const double bx = std::sqrt(6.0 / (in + hi));
  const double bh = std::sqrt(6.0 / (hi + hi));
  for (Gate g : kGates) {
    fill_uniform(net.lstm.wx(g), bx, rng);
    fill_uniform(net.lstm.wh(g), bh, rng);
  }
  net.lstm.bias(Gate::Forget).setOnes();
  fill_uniform(net.head.W, std::sqrt(6.0 / (hi + 2.0)), rng);
  return net;
}

std::vector<double> flatten(const LstmNetwork& net) {
  std::vector<double> out;
  out.reserve(net.scalar_count());
  auto push = [&out](const auto& m) { out.insert(out.end(), m.data(), m.data() + m.size()); };
  push(net.lstm.Wx);
  push(net.lstm.Wh);
  push(net.lstm.b);
  push(net.head.W);
  push(net.head.b);
  return out;
}

void unflatten(std::span<const double> flat, LstmNetwork& net) {
  require(flat.size() == net.scalar_count(), "unflatten: size mismatch");
  std::size_t pos = 0;
  auto pull = [&](auto& m) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), m.size(), m.data());
    pos += static_cast<std::size_t>(m.size());
  };
  pull(net.lstm.Wx);
  pull(net.lstm.Wh);
  pull(net.lstm.b);
  pull(net.head.W);
  pull(net.head.b);
}

LstmState lstm_step(const LstmParams& p, std::span<const double> x, const LstmState& prev,
                    GateActivations* gates) {
  require(x.size() == p.input_dim, "lstm_step: input dimension mismatch");
  const auto h = static_cast<Eigen::Index>(p.hidden_dim);
  require(prev.s.size() == h && prev.h.size() == h, "lstm_step: state dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));

  auto pre = [&](Gate g) -> Eigen::VectorXd { return p.wx(g) * xv + p.wh(g) * prev.h + p.bias(g); };
  const Eigen::VectorXd f = sigmoid(pre(Gate::Forget));
  const Eigen::VectorXd c = tanh_vec(pre(Gate::Candidate));
  const Eigen::VectorXd i = sigmoid(pre(Gate::Input));
  LstmState next;
  next.s = f.cwiseProduct(prev.s) + i.cwiseProduct(c);
  const Eigen::VectorXd o = sigmoid(pre(Gate::Output));
  next.h = o.cwiseProduct(tanh_vec(next.s));
  if (gates != nullptr) *gates = {f, c, i, o};
  return next;
}

Posterior forward(const LstmNetwork& net, std::span<const FeatureVector> seq, double dropout_rate,
                  Rng* rng) {
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "forward: dropout_rate must be in [0, 1)");
  const ForwardTrace tr = run(net, seq, dropout_rate, rng, false);
  return {tr.prob(0), tr.prob(1)};
}

double logit_margin(const LstmNetwork& net, std::span<const FeatureVector> seq) {
  const ForwardTrace tr = run(net, seq, 0.0, nullptr, false);
  return tr.logits(1) - tr.logits(0);
}

LossAndGradients loss_and_gradients(const LstmNetwork& net, std::span<const Example> batch,
                                    double dropout_rate, Rng* rng) {
  require(!batch.empty(), "loss_and_gradients: empty batch");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "loss_and_gradients: dropout_rate must be in [0, 1)");
  const auto h = static_cast<Eigen::Index>(net.hidden_dim());
  const auto& p = net.lstm;

  LossAndGradients out;
  zero_like(out.grad, net);
  auto& g = out.grad;
  const double scale = 1.0 / static_cast<double>(batch.size());

  Eigen::VectorXd dz(4 * h);
  for (const auto& ex : batch) {
    const ForwardTrace tr = run(net, ex.seq, dropout_rate, rng, true);
    const int y = label_of(ex.label);
    out.loss -= std::log(std::max(tr.prob(y), 1e-300)) * scale;

    Eigen::Vector2d dlogits = tr.prob;
    dlogits(y) -= 1.0;
    dlogits *= scale;

    const Eigen::VectorXd& h_last = tr.steps.back().h;
    const Eigen::VectorXd h_drop = h_last.cwiseProduct(tr.mask);
    g.head.W.noalias() += dlogits * h_drop.transpose();
    g.head.b += dlogits;

    Eigen::VectorXd dh = (net.head.W.transpose() * dlogits).cwiseProduct(tr.mask);
    Eigen::VectorXd ds_next = Eigen::VectorXd::Zero(h);
    const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(h);

    for (std::size_t t = ex.seq.size(); t-- > 0;) {
      const StepCache& st = tr.steps[t];
      const Eigen::VectorXd& s_prev = t > 0 ? tr.steps[t - 1].s : zeros;
      const Eigen::VectorXd& h_prev = t > 0 ? tr.steps[t - 1].h : zeros;

      const Eigen::ArrayXd ds = dh.array() * st.o.array() * (1.0 - st.tanh_s.array().square()) + ds_next.array();
      const Eigen::ArrayXd d_o = dh.array() * st.tanh_s.array();

      dz.segment(0, h) = (ds * s_prev.array() * st.f.array() * (1.0 - st.f.array())).matrix();
      dz.segment(h, h) = (ds * st.i.array() * (1.0 - st.c.array().square())).matrix();
      dz.segment(2 * h, h) = (ds * st.c.array() * st.i.array() * (1.0 - st.i.array())).matrix();
      dz.segment(3 * h, h) = (d_o * st.o.array() * (1.0 - st.o.array())).matrix();

      Eigen::Map<const Eigen::Vector4d> x(ex.seq[t].u.data());
      g.lstm.Wx.noalias() += dz * x.transpose();
      g.lstm.Wh.noalias() += dz * h_prev.transpose();
      g.lstm.b += dz;

      dh.noalias() = p.Wh.transpose() * dz;
      ds_next = (ds * st.f.array()).matrix();
    }
  }
  return out;
}

double grad_check(std::size_t hidden, std::size_t input, std::size_t seq_len, std::uint64_t seed,
                  double eps, std::size_t batch) {
  require(eps > 0.0, "grad_check: eps must be > 0");
  require(input == kNumFeatures, "grad_check: input dimension must equal the feature count");
  require(seq_len >= 1 && batch >= 1, "grad_check: seq_len and batch must be >= 1");

  Rng rng(seed);
  LstmNetwork net(input, hidden);
  std::vector<double> flat(net.scalar_count());
  for (auto& w : flat) w = rng.uniform() - 0.5;
  unflatten(flat, net);

  std::vector<FeatureSequence> seqs(batch, FeatureSequence(seq_len));
  std::vector<Example> examples;
  for (std::size_t b = 0; b < batch; ++b) {
    for (auto& v : seqs[b]) {
      for (auto& u : v.u) u = rng.normal();
    }
    examples.push_back({seqs[b], b % 2 == 0 ? Hypothesis::H1 : Hypothesis::H0});
  }

  const std::vector<double> analytic = flatten(loss_and_gradients(net, examples).grad);
  double worst = 0.0;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const double saved = flat[k];
    flat[k] = saved + eps;
    unflatten(flat, net);
    const double up = loss_and_gradients(net, examples).loss;
    flat[k] = saved - eps;
    unflatten(flat, net);
    const double down = loss_and_gradients(net, examples).loss;
    flat[k] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    // Floor keeps vanishing gradients from producing 0/0.
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  unflatten(flat, net);
  return worst;
}

}  // namespace specsense
