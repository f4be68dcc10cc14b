#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "specsense/error.hpp"
#include "specsense/features.hpp"

namespace specsense {

namespace {

constexpr double kCdfClamp = 1e-12;

// Standard normal CDF via erfc; accurate in both tails.
double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double clamp_prob(double p) noexcept { return std::clamp(p, kCdfClamp, 1.0 - kCdfClamp); }

}  // namespace

double gof_za_ordered(std::span<const double> x) {
  const std::size_t n = x.size();
  require(n > 0, "gof_za: empty sample");
  const double nd = static_cast<double>(n);

  // a_i = log F(x_i)/(n-i+1/2) + log(1-F(x_i))/(i-1/2), 1-based i.
  // 1-F(x) is evaluated as F(-x) so that negating the sample maps a_i onto
  // a_{n+1-i} exactly; summing mirrored pairs keeps Z_A bit-identical.
  auto term = [&](std::size_t idx0) {
    const double i = static_cast<double>(idx0 + 1);
    const double lo = std::log(clamp_prob(normal_cdf(x[idx0])));
    const double hi = std::log(clamp_prob(normal_cdf(-x[idx0])));
    return lo / (nd - i + 0.5) + hi / (i - 0.5);
  };

  double sum = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) sum += term(i) + term(n - 1 - i);
  if (n % 2 == 1) sum += term(n / 2);
  return -sum;
}

double gof_za(std::span<const cplx> frame, const NoiseModel& noise) {
  require(!frame.empty(), "gof_za: empty frame");
  const double inv_scale = 1.0 / std::sqrt(noise.variance / 2.0);
  std::vector<double> x;
  x.reserve(2 * frame.size());
  for (const auto& y : frame) {
    x.push_back(y.real() * inv_scale);
    x.push_back(y.imag() * inv_scale);
  }
  std::sort(x.begin(), x.end());
  return gof_za_ordered(x);
}

}  // namespace specsense
