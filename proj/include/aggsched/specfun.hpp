#pragma once

namespace aggsched {

/// Digamma function psi(x) for x > 0.
double digamma(double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// For integer a, Q(k + 1, m) is the Poisson CDF Pr(K <= k) with mean m.
double regularized_gamma_q(double a, double x);

/// log Pr(K = k) for K ~ Poisson(mean). mean == 0 gives 0 at k == 0, -inf elsewhere.
double log_poisson_pmf(long k, double mean);

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

}  // namespace aggsched
