#pragma once

namespace specsense {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed without cancellation.
double gamma_q(double a, double x);
/// x such that Q(a, x) = q, for q in (0, 1).
double gamma_q_inverse(double a, double q);

}  // namespace specsense
