#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "specsense/error.hpp"
#include "specsense/lstm.hpp"

using namespace specsense;

namespace {

FeatureSequence random_sequence(std::size_t T, Rng& rng, double scale = 1.0) {
  FeatureSequence seq(T);
  for (auto& v : seq)
    for (auto& u : v.u) u = scale * rng.normal();
  return seq;
}

LstmParams random_params(std::size_t input, std::size_t hidden, Rng& rng) {
  LstmParams p(input, hidden);
  for (Eigen::Index k = 0; k < p.Wx.size(); ++k) p.Wx.data()[k] = rng.normal();
  for (Eigen::Index k = 0; k < p.Wh.size(); ++k) p.Wh.data()[k] = rng.normal();
  for (Eigen::Index k = 0; k < p.b.size(); ++k) p.b[k] = rng.normal();
  return p;
}

oracle::ScalarLstm to_scalar(const LstmParams& p) {
  const std::size_t H = p.hidden_dim, I = p.input_dim;
  oracle::ScalarLstm s;
  s.W.assign(4, std::vector<std::vector<double>>(H, std::vector<double>(I)));
  s.U.assign(4, std::vector<std::vector<double>>(H, std::vector<double>(H)));
  s.b.assign(4, std::vector<double>(H));
  for (int g = 0; g < 4; ++g) {
    for (std::size_t r = 0; r < H; ++r) {
      const auto row = static_cast<Eigen::Index>(g * H + r);
      for (std::size_t c = 0; c < I; ++c) s.W[g][r][c] = p.Wx(row, static_cast<Eigen::Index>(c));
      for (std::size_t c = 0; c < H; ++c) s.U[g][r][c] = p.Wh(row, static_cast<Eigen::Index>(c));
      s.b[g][r] = p.b(row);
    }
  }
  return s;
}

}  // namespace

TEST(ParamCount, KnownValues) {
  EXPECT_EQ(param_count(25, 4), 3000u);
  EXPECT_EQ(param_count(1, 1), 12u);
  EXPECT_EQ(LstmParams(4, 25).scalar_count(), 3000u);
}

TEST(ParamCount, MatchesAllocatedScalars) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t h = 1 + rng.below(16), i = 1 + rng.below(16);
    const LstmParams p(i, h);
    EXPECT_EQ(p.scalar_count(), param_count(h, i));
    EXPECT_EQ(p.scalar_count(), 4 * (h * i + h + h * h));
  }
}

TEST(LstmStep, ZeroWeights) {
  const LstmParams p(2, 3);
  GateActivations g;
  const std::vector<double> x = {0.7, -2.0};
  const auto next = lstm_step(p, x, LstmState::zeros(3), &g);
  for (Eigen::Index r = 0; r < 3; ++r) {
    EXPECT_EQ(g.forget[r], 0.5);
    EXPECT_EQ(g.input[r], 0.5);
    EXPECT_EQ(g.output[r], 0.5);
    EXPECT_EQ(g.candidate[r], 0.0);
    EXPECT_EQ(next.s[r], 0.0);
    EXPECT_EQ(next.h[r], 0.0);
  }
}

TEST(LstmStep, SaturatedForgetGateClearsState) {
  LstmParams p(2, 3);
  p.bias(Gate::Forget).setConstant(-100.0);
  LstmState prev = LstmState::zeros(3);
  prev.s << 5.0, -3.0, 8.0;
  const std::vector<double> x = {1.0, 1.0};
  const auto next = lstm_step(p, x, prev);
  EXPECT_LT(next.s.cwiseAbs().maxCoeff(), 1e-40);
}

TEST(LstmStep, MatchesScalarOracle) {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const auto p = random_params(2, 3, rng);
    const auto sp = to_scalar(p);
    LstmState st = LstmState::zeros(3);
    std::vector<double> s(3, 0.0), h(3, 0.0);
    for (int step = 0; step < 6; ++step) {
      const std::vector<double> x = {rng.normal(), rng.normal()};
      st = lstm_step(p, x, st);
      std::vector<double> s2, h2;
      oracle::lstm_step(sp, x, s, h, s2, h2);
      s = s2;
      h = h2;
      for (std::size_t r = 0; r < 3; ++r) {
        EXPECT_NEAR(st.s[static_cast<Eigen::Index>(r)], s[r], 1e-12);
        EXPECT_NEAR(st.h[static_cast<Eigen::Index>(r)], h[r], 1e-12);
      }
    }
  }
}

TEST(LstmStep, GateRanges) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_params(4, 5, rng);
    LstmState st = LstmState::zeros(5);
    for (int step = 0; step < 10; ++step) {
      const std::vector<double> x = {3 * rng.normal(), 3 * rng.normal(), 3 * rng.normal(), 3 * rng.normal()};
      GateActivations g;
      st = lstm_step(p, x, st, &g);
      for (const auto* v : {&g.forget, &g.input, &g.output}) {
        EXPECT_GT(v->minCoeff(), 0.0);
        EXPECT_LT(v->maxCoeff(), 1.0);
      }
      EXPECT_LT(st.h.cwiseAbs().maxCoeff(), 1.0);
    }
  }
}

TEST(LstmStep, RejectsDimensionMismatch) {
  const LstmParams p(2, 3);
  const std::vector<double> x = {1.0, 2.0, 3.0};
  EXPECT_THROW(lstm_step(p, x, LstmState::zeros(3)), InvalidArgument);
  const std::vector<double> x2 = {1.0, 2.0};
  EXPECT_THROW(lstm_step(p, x2, LstmState::zeros(4)), InvalidArgument);
}

TEST(Forward, ZeroHeadGivesHalf) {
  Rng rng(1);
  auto net = init_network(4, 6, 5);
  net.head = DenseHead(6);
  for (int t = 0; t < 5; ++t) {
    const auto p = forward(net, random_sequence(1 + t, rng));
    EXPECT_EQ(p.h0, 0.5);
    EXPECT_EQ(p.h1, 0.5);
  }
}

TEST(Forward, PosteriorSumsToOneAndIsDeterministic) {
  Rng rng(2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto net = init_network(4, 5, s);
    for (Eigen::Index k = 0; k < net.head.W.size(); ++k) net.head.W.data()[k] = 5 * rng.normal();
    const auto seq = random_sequence(7, rng, 10.0);
    const auto a = forward(net, seq);
    const auto b = forward(net, seq);
    EXPECT_NEAR(a.h0 + a.h1, 1.0, 1e-12);
    EXPECT_EQ(a.h0, b.h0);
    EXPECT_EQ(a.h1, b.h1);
    EXPECT_GE(a.h1, 0.0);
    EXPECT_LE(a.h1, 1.0);
  }
}

TEST(Forward, MarginOrdersWithPosterior) {
  Rng rng(9);
  const auto net = init_network(4, 5, 4);
  for (int t = 0; t < 10; ++t) {
    const auto seq = random_sequence(4, rng);
    const auto p = forward(net, seq);
    EXPECT_EQ(logit_margin(net, seq) > 0.0, p.h1 > p.h0);
  }
}

TEST(Forward, RejectsEmptySequence) {
  const auto net = init_network(4, 3, 1);
  EXPECT_THROW(forward(net, FeatureSequence{}), InvalidArgument);
}

TEST(Init, ForgetBiasOneOthersZeroAndBounded) {
  const auto net = init_network(4, 25, 3);
  EXPECT_EQ(net.lstm.bias(Gate::Forget), Eigen::VectorXd::Ones(25));
  EXPECT_EQ(net.lstm.bias(Gate::Input).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(net.lstm.bias(Gate::Candidate).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(net.lstm.bias(Gate::Output).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(net.lstm.Wx.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(flatten(net), flatten(init_network(4, 25, 3)));
  EXPECT_NE(flatten(net), flatten(init_network(4, 25, 4)));
}

TEST(Flatten, RoundTrip) {
  const auto net = init_network(4, 3, 8);
  LstmNetwork copy(4, 3);
  unflatten(flatten(net), copy);
  EXPECT_EQ(flatten(copy), flatten(net));
  EXPECT_EQ(flatten(net).size(), net.scalar_count());
  std::vector<double> wrong(5);
  EXPECT_THROW(unflatten(wrong, copy), InvalidArgument);
}

TEST(Loss, UniformPosteriorGivesLogTwo) {
  Rng rng(4);
  auto net = init_network(4, 3, 1);
  net.head = DenseHead(3);
  const auto seq = random_sequence(3, rng);
  const std::vector<Example> batch = {{seq, Hypothesis::H0}, {seq, Hypothesis::H1}};
  EXPECT_NEAR(loss_and_gradients(net, batch).loss, std::log(2.0), 1e-15);
}

TEST(Loss, ConfidentCorrectPosteriorGivesNearZero) {
  Rng rng(4);
  auto net = init_network(4, 3, 1);
  net.head = DenseHead(3);
  net.head.b << -50.0, 50.0;
  const auto seq = random_sequence(3, rng);
  const std::vector<Example> batch = {{seq, Hypothesis::H1}};
  EXPECT_LT(loss_and_gradients(net, batch).loss, 1e-20);
}

TEST(Loss, RejectsEmptyBatch) {
  const auto net = init_network(4, 3, 1);
  EXPECT_THROW(loss_and_gradients(net, std::vector<Example>{}), InvalidArgument);
}

TEST(GradCheck, ThreeSeedsBelowTolerance) {
  for (std::uint64_t seed : {1u, 2u, 3u}) EXPECT_LT(grad_check(4, 4, 5, seed, 1e-5), 1e-4) << seed;
}

TEST(GradCheck, LongerSequenceAndWiderHidden) { EXPECT_LT(grad_check(7, 4, 12, 99, 1e-5), 1e-4); }

TEST(GradCheck, RejectsZeroStep) {
  EXPECT_THROW(grad_check(4, 4, 5, 1, 0.0), InvalidArgument);
  EXPECT_THROW(grad_check(4, 4, 5, 1, -1e-5), InvalidArgument);
}

TEST(Dropout, TrainingModeUsesRngInferenceDoesNot) {
  Rng data(5);
  auto net = init_network(4, 8, 2);
  for (Eigen::Index k = 0; k < net.head.W.size(); ++k) net.head.W.data()[k] = data.normal();
  const auto seq = random_sequence(4, data);
  Rng r1(7), r2(7);
  const auto a = forward(net, seq, 0.5, &r1);
  const auto b = forward(net, seq, 0.5, &r2);
  EXPECT_EQ(a.h1, b.h1);
  EXPECT_EQ(forward(net, seq, 0.5).h1, forward(net, seq).h1);
  EXPECT_THROW(forward(net, seq, 1.0, &r1), InvalidArgument);
}
