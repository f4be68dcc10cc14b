#include <cmath>

#include "specsense/error.hpp"
#include "specsense/features.hpp"

namespace specsense {

Eigen::MatrixXcd smoothed_covariance(std::span<const cplx> x, const SmoothingConfig& cfg) {
  cfg.validate();
  const std::size_t L = cfg.L;
  const std::size_t Ns = cfg.Ns;
  require(x.size() >= L - 1 + Ns, "smoothed_covariance: need at least L-1+Ns = " +
                                      std::to_string(L - 1 + Ns) + " samples, got " +
                                      std::to_string(x.size()));

  const auto dim = static_cast<Eigen::Index>(L);
  Eigen::MatrixXcd R(dim, dim);
  // R(i, j) = (1/Ns) sum_n x(n-i) conj(x(n-j)), n = L-1 .. L-2+Ns.
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = i; j < L; ++j) {
      cplx acc{0.0, 0.0};
      const std::size_t start = L - 1;
      for (std::size_t n = start; n < start + Ns; ++n) acc += x[n - i] * std::conj(x[n - j]);
      acc /= static_cast<double>(Ns);
      if (i == j) acc.imag(0.0);
      R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
      R(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(acc);
    }
  }
  return R;
}

double mme_ratio(std::span<const cplx> signal, const SmoothingConfig& cfg) {
  const Eigen::MatrixXcd R = smoothed_covariance(signal, cfg);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R, Eigen::EigenvaluesOnly);
  require(eig.info() == Eigen::Success, "mme_ratio: eigendecomposition failed");
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  if (!(lmax > 0.0) || lmin < 1e-15 * lmax) return kMmeRatioCap;
  return std::min(std::max(lmax / lmin, 1.0), kMmeRatioCap);
}

std::pair<double, double> mme_asymptotic_bounds(const NoiseModel& noise, const SmoothingConfig& cfg) {
  require(cfg.Ns >= 1 && cfg.L >= 1 && cfg.M >= 1, "mme_asymptotic_bounds: sizes must be >= 1");
  const double ns = static_cast<double>(cfg.Ns);
  const double ml = static_cast<double>(cfg.M * cfg.L);
  require(ns > ml, "mme_asymptotic_bounds: Ns must exceed M*L");
  const double scale = noise.variance / ns;
  const double hi = std::sqrt(ns) + std::sqrt(ml);
  const double lo = std::sqrt(ns) - std::sqrt(ml);
  return {scale * hi * hi, scale * lo * lo};
}

}  // namespace specsense
