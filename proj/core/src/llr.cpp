#include <cassert>
#include <cmath>

#include "specsense/error.hpp"
#include "specsense/features.hpp"

namespace specsense {

double llr(std::span<const cplx> frame, const SignalCovariance& sig_cov, const NoiseModel& noise) {
  const auto n = static_cast<Eigen::Index>(frame.size());
  require(n > 0, "llr: empty frame");
  require(sig_cov.matrix.rows() == n && sig_cov.matrix.cols() == n,
          "llr: covariance dimension does not match frame length");
  const double s2 = noise.variance;

  Eigen::MatrixXcd loaded = sig_cov.matrix;
  loaded.diagonal().array() += s2;
  const Eigen::LLT<Eigen::MatrixXcd> chol(loaded);
  // Sigma PSD and s2 > 0 make the loaded matrix positive definite.
  assert(chol.info() == Eigen::Success);

  double log_det_loaded = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) log_det_loaded += 2.0 * std::log(chol.matrixL()(k, k).real());
  const double log_det_term = log_det_loaded - static_cast<double>(n) * std::log(s2);

  Eigen::Map<const Eigen::VectorXcd> y(frame.data(), n);
  const Eigen::VectorXcd solved = chol.solve(y);
  const double quad = y.squaredNorm() / s2 - y.dot(solved).real();
  return -log_det_term + quad;
}

LlrEvaluator::LlrEvaluator(const SignalCovariance& sig_cov, const NoiseModel& noise,
                           double rel_truncation)
    : dim_(sig_cov.dim()) {
  require(dim_ > 0, "LlrEvaluator: empty covariance");
  require(sig_cov.matrix.cols() == sig_cov.matrix.rows(), "LlrEvaluator: covariance not square");
  require(rel_truncation >= 0.0, "LlrEvaluator: truncation must be >= 0");
  const double s2 = noise.variance;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sig_cov.matrix);
  require(eig.info() == Eigen::Success, "LlrEvaluator: eigendecomposition failed");
  // Clip round-off negatives; Sigma is PSD by construction.
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  const auto n = lambda.size();

  log_det_term_ = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) log_det_term_ += std::log1p(lambda(k) / s2);

  auto weight = [s2](double l) { return l / (s2 * (l + s2)); };

  // Eigenvalues ascend; keep the tail that rises above the floor.
  const double floor = lambda(0);
  const double cut = floor + rel_truncation * lambda(n - 1);
  Eigen::Index first_kept = 0;
  while (first_kept < n && lambda(first_kept) <= cut) ++first_kept;
  if (rel_truncation == 0.0) first_kept = 0;

  const Eigen::Index kept = n - first_kept;
  basis_ = eig.eigenvectors().rightCols(kept);
  weights_.resize(kept);
  for (Eigen::Index k = 0; k < kept; ++k) weights_(k) = weight(lambda(first_kept + k));

  if (first_kept > 0) {
    double wsum = 0.0;
    for (Eigen::Index k = 0; k < first_kept; ++k) wsum += weight(lambda(k));
    residual_weight_ = wsum / static_cast<double>(first_kept);
    residual_spread_ = weight(lambda(first_kept - 1)) - weight(lambda(0));
  } else {
    residual_weight_ = 0.0;
    residual_spread_ = 0.0;
  }
}

double LlrEvaluator::operator()(std::span<const cplx> frame) const {
  require(frame.size() == dim_, "llr: frame length does not match covariance dimension");
  Eigen::Map<const Eigen::VectorXcd> y(frame.data(), static_cast<Eigen::Index>(dim_));
  const Eigen::VectorXcd proj = basis_.adjoint() * y;
  const double total = y.squaredNorm();
  double quad = 0.0;
  double captured = 0.0;
  for (Eigen::Index k = 0; k < proj.size(); ++k) {
    const double p = std::norm(proj(k));
    quad += weights_(k) * p;
    captured += p;
  }
  quad += residual_weight_ * std::max(total - captured, 0.0);
  return -log_det_term_ + quad;
}

}  // namespace specsense
