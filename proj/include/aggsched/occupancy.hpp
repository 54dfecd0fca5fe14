#pragma once

#include <vector>

#include "aggsched/params.hpp"

namespace aggsched {

/// Distribution of the number of devices sharing one channel of a cluster.
struct OccupancyPMF {
  std::vector<double> c;  // c[u] = Pr(U = u), u = 0..L
  double c_bar = 0.0;

  double at(int u) const { return u >= 0 && u < static_cast<int>(c.size()) ? c[u] : 0.0; }
  int L() const { return static_cast<int>(c.size()) - 1; }

  /// Builds a PMF from explicit probabilities (used for synthetic interferer mixes).
  static OccupancyPMF from_probabilities(std::vector<double> c);
};

/// Pr(U = u | K = k) for the round-based random assignment of k devices over N channels.
std::vector<double> conditional_occupancy(long k, int N, int L);

/// Closed-form PMF for K ~ Poisson(m_bar).
OccupancyPMF occupancy_pmf(const NetworkParams& params);
OccupancyPMF occupancy_pmf(double m_bar, int N, int L);

/// Same PMF as the explicit Poisson mixture of conditional_occupancy over k < N L, with the
/// saturated tail Pr(K >= N L) added to u = L. O(N L); kept as a cross-check.
OccupancyPMF occupancy_pmf_mixture(double m_bar, int N, int L);

/// Smallest k with Q(k + 1, m_bar) > 1 - tau.
long kmax_for_tail(double m_bar, double tau);

/// Pr(K = k) and Pr(K <= k) for K ~ Poisson(mean).
double poisson_pmf(long k, double mean);
double poisson_cdf(long k, double mean);

}  // namespace aggsched
