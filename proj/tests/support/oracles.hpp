#pragma once

// Reference implementations that share no code with the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct ScalarLstm {
  // W[g][r][c]: input weights, U[g][r][c]: recurrent weights, b[g][r].
  // Gate order: forget, candidate, input, output.
  std::vector<std::vector<std::vector<double>>> W, U;
  std::vector<std::vector<double>> b;
};

/// One step of the gate equations, element by element.
inline void lstm_step(const ScalarLstm& p, const std::vector<double>& x, const std::vector<double>& s_prev,
                      const std::vector<double>& h_prev, std::vector<double>& s, std::vector<double>& h) {
  const std::size_t H = h_prev.size();
  s.assign(H, 0.0);
  h.assign(H, 0.0);
  for (std::size_t r = 0; r < H; ++r) {
    double pre[4];
    for (int g = 0; g < 4; ++g) {
      double acc = p.b[g][r];
      for (std::size_t c = 0; c < x.size(); ++c) acc += p.W[g][r][c] * x[c];
      for (std::size_t c = 0; c < H; ++c) acc += p.U[g][r][c] * h_prev[c];
      pre[g] = acc;
    }
    const double f = sigmoid(pre[0]);
    const double cand = std::tanh(pre[1]);
    const double in = sigmoid(pre[2]);
    const double out = sigmoid(pre[3]);
    s[r] = f * s_prev[r] + in * cand;
    h[r] = out * std::tanh(s[r]);
  }
}

/// log of the circular complex Gaussian density CN(0, C) at y.
inline double complex_gaussian_logpdf(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& C) {
  const auto n = static_cast<double>(y.size());
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(C);
  const std::complex<double> det = lu.determinant();
  const std::complex<double> quad = y.adjoint() * lu.solve(y);
  return -n * std::log(std::numbers::pi) - std::log(det.real()) - quad.real();
}

inline double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); }

/// Z_A written straight from its definition over sorted x, 1-based i.
inline double za_direct(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double z = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    // Upper tail from erfc so it keeps precision for large x.
    const double F = std::max(normal_cdf(x[k]), 1e-12);
    const double G = std::max(0.5 * std::erfc(x[k] / std::sqrt(2.0)), 1e-12);
    z -= std::log(F) / (n - i + 0.5) + std::log(G) / (i - 0.5);
  }
  return z;
}

/// Smoothed covariance with explicit loops over stacked vectors.
inline Eigen::MatrixXcd smoothed_covariance(const std::vector<std::complex<double>>& x, std::size_t L,
                                            std::size_t Ns) {
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  for (std::size_t n = L - 1; n < L - 1 + Ns; ++n) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(L));
    for (std::size_t k = 0; k < L; ++k) v(static_cast<Eigen::Index>(k)) = x[n - k];
    R += v * v.adjoint();
  }
  return R / static_cast<double>(Ns);
}

}  // namespace oracle
