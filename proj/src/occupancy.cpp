#include "aggsched/occupancy.hpp"

#include <algorithm>
#include <cmath>

#include "aggsched/specfun.hpp"

namespace aggsched {

namespace {

void check_shape(int N, int L) {
  if (N < 1) throw domain_error("occupancy: N must be >= 1");
  if (L < 1) throw domain_error("occupancy: L must be >= 1");
}

// Q(n, m) with Q(0, m) = 0: the "no devices below zero" convention of the closed form.
double q_int(long n, double m) { return n <= 0 ? 0.0 : regularized_gamma_q(static_cast<double>(n), m); }

// exp(-m) m^n / (N (n - 1)!), zero for n <= 0.
double edge_term(long n, double m, int N) {
  if (n <= 0) return 0.0;
  if (m == 0.0) return 0.0;
  return std::exp(-m + static_cast<double>(n) * std::log(m) - std::lgamma(static_cast<double>(n)) -
                  std::log(static_cast<double>(N)));
}

}  // namespace

OccupancyPMF OccupancyPMF::from_probabilities(std::vector<double> c) {
  if (c.size() < 2) throw domain_error("OccupancyPMF: need probabilities for u = 0..L with L >= 1");
  double total = 0.0;
  for (double v : c) {
    if (!(v >= 0.0 && v <= 1.0)) throw domain_error("OccupancyPMF: probabilities must lie in [0, 1]");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw domain_error("OccupancyPMF: probabilities must sum to 1");
  OccupancyPMF pmf;
  pmf.c = std::move(c);
  for (std::size_t u = 0; u < pmf.c.size(); ++u) pmf.c_bar += static_cast<double>(u) * pmf.c[u];
  return pmf;
}

std::vector<double> conditional_occupancy(long k, int N, int L) {
  check_shape(N, L);
  if (k < 0) throw domain_error("conditional_occupancy: k must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(L) + 1, 0.0);
  if (k >= static_cast<long>(N) * L) {
    p[L] = 1.0;
    return p;
  }
  const long full = k / N;
  const long rest = k % N;
  const double frac = static_cast<double>(rest) / N;
  p[full] += 1.0 - frac;
  if (rest > 0) p[full + 1] += frac;
  return p;
}

OccupancyPMF occupancy_pmf(const NetworkParams& params) { return occupancy_pmf(params.m_bar, params.N, params.L); }

OccupancyPMF occupancy_pmf(double m, int N, int L) {
  check_shape(N, L);
  if (!(m >= 0.0) || !std::isfinite(m)) throw domain_error("occupancy_pmf: m_bar must be non-negative");
  const double load = m / N;
  std::vector<double> c(static_cast<std::size_t>(L) + 1, 0.0);
  const long n = N;

  c[0] = q_int(n, m) * (1.0 - load) + (m == 0.0 ? 0.0 : std::exp(-m + n * std::log(m) - std::lgamma(n + 1.0)));
  for (int u = 1; u < L; ++u) {
    double v = 0.0;
    for (int t = -1; t <= 1; ++t) {
      const long nt = n * (u + t);
      const double weight = t == 0 ? 2.0 : 1.0;
      const double sign_t = t == 0 ? 1.0 : -1.0;           // (-1)^t
      const double sign_edge = t == 0 ? -1.0 : 1.0;        // (-1)^(1 - |t|)
      v += weight * (q_int(nt, m) * (t + sign_t * (load - u)) + sign_edge * edge_term(nt, m, N));
    }
    c[u] = v;
  }
  {
    double v = 1.0;
    for (int t = 0; t <= 1; ++t) {
      const long nt = n * (L - t);
      const double sign_t = t == 0 ? 1.0 : -1.0;
      v += q_int(nt, m) * (sign_t * (load - L) - t) - sign_t * edge_term(nt, m, N);
    }
    c[L] = v;
  }
  // Cancellation can leave values a few ulps outside [0, 1].
  for (double& v : c) v = std::clamp(v, 0.0, 1.0);
  OccupancyPMF pmf;
  pmf.c = std::move(c);
  for (int u = 0; u <= L; ++u) pmf.c_bar += u * pmf.c[u];
  return pmf;
}

OccupancyPMF occupancy_pmf_mixture(double m, int N, int L) {
  check_shape(N, L);
  if (!(m >= 0.0) || !std::isfinite(m)) throw domain_error("occupancy_pmf_mixture: m_bar must be non-negative");
  std::vector<double> c(static_cast<std::size_t>(L) + 1, 0.0);
  const long saturation = static_cast<long>(N) * L;
  for (long k = 0; k < saturation; ++k) {
    const double w = poisson_pmf(k, m);
    const auto cond = conditional_occupancy(k, N, L);
    for (int u = 0; u <= L; ++u) c[u] += w * cond[u];
  }
  // Everything at or above saturation lands on u = L.
  c[L] += std::max(0.0, 1.0 - regularized_gamma_q(static_cast<double>(saturation), m));
  OccupancyPMF pmf;
  pmf.c = std::move(c);
  for (int u = 0; u <= L; ++u) pmf.c_bar += u * pmf.c[u];
  return pmf;
}

long kmax_for_tail(double m, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw domain_error("kmax_for_tail: tau must lie in (0, 1)");
  if (!(m >= 0.0) || !std::isfinite(m)) throw domain_error("kmax_for_tail: m_bar must be non-negative");
  long k = 0;
  while (!(regularized_gamma_q(static_cast<double>(k + 1), m) > 1.0 - tau)) ++k;
  return k;
}

double poisson_pmf(long k, double mean) {
  const double lp = log_poisson_pmf(k, mean);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double poisson_cdf(long k, double mean) {
  if (k < 0) return 0.0;
  return regularized_gamma_q(static_cast<double>(k + 1), mean);
}

}  // namespace aggsched
