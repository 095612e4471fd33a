#pragma once

namespace stochbench {

// Standard normal CDF. Uses the positive-term Taylor series of erf for
// |z|/sqrt(2) < 3 and the Laplace continued fraction of erfc beyond that;
// absolute error is a few ulps of 1.
double normal_cdf(double z);

// z with |normal_cdf(z) - alpha| <= 1e-10, found by bisection on [-10, 10].
// Throws DomainError unless 0 < alpha < 1.
double normal_quantile(double alpha);

}  // namespace stochbench
