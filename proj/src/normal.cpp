#include "stochbench/normal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stochbench/errors.hpp"

namespace stochbench {

namespace {

// erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))
// Every term is positive, so there is no cancellation for moderate x.
double erf_series(double x) {
  double term = x;
  double sum = x;
  const double x2 = x * x;
  for (int n = 1; n < 500; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz algorithm; valid for x > 0.
double erfc_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    double a = 0.5 * k;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / std::sqrt(std::numbers::pi) / f;
}

}  // namespace

double normal_cdf(double z) {
  const double x = std::abs(z) / std::numbers::sqrt2;
  if (x < 3.0) {
    double e = erf_series(x);
    return z >= 0 ? 0.5 * (1.0 + e) : 0.5 * (1.0 - e);
  }
  double tail = 0.5 * erfc_continued_fraction(x);
  return z >= 0 ? 1.0 - tail : tail;
}

double normal_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("normal_quantile needs 0 < alpha < 1, got " + std::to_string(alpha));
  double lo = -10.0;
  double hi = 10.0;
  double mid = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    mid = 0.5 * (lo + hi);
    double p = normal_cdf(mid);
    if (p == alpha) return mid;
    (p < alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace stochbench
