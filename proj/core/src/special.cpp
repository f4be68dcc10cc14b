#include "specsense/special.hpp"

#include <cmath>
#include <limits>

#include "specsense/error.hpp"

namespace specsense {

namespace {

constexpr int kMaxIter = 10000;
constexpr double kEps = 1e-16;

// Series for P(a, x), valid for x < a + 1.
double p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  require(a > 0.0, "gamma_p: shape must be > 0");
  require(x >= 0.0, "gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? p_series(a, x) : 1.0 - q_fraction(a, x);
}

double gamma_q(double a, double x) {
  require(a > 0.0, "gamma_q: shape must be > 0");
  require(x >= 0.0, "gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - p_series(a, x) : q_fraction(a, x);
}

double gamma_q_inverse(double a, double q) {
  require(a > 0.0, "gamma_q_inverse: shape must be > 0");
  require(q > 0.0 && q < 1.0, "gamma_q_inverse: q must be in (0, 1)");

  // Bracket: Q is decreasing in x.
  double lo = 0.0;
  double hi = a + 1.0;
  while (gamma_q(a, hi) > q) {
    lo = hi;
    hi *= 2.0;
  }

  // Safeguarded Newton on f(x) = Q(a, x) - q, f'(x) = -x^(a-1) e^-x / Gamma(a).
  double x = 0.5 * (lo + hi);
  const double lg = std::lgamma(a);
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_q(a, x) - q;
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double deriv = -std::exp((a - 1.0) * std::log(x) - x - lg);
    double next = deriv != 0.0 ? x - f / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

}  // namespace specsense
