#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aggsched/params.hpp"
#include "aggsched/rng.hpp"

namespace aggsched {

/// Channel assignment of the K devices of one cluster.
struct Assignment {
  /// channels[n] lists device indices on channel n. Under CRS the list is in decode order;
  /// under RRS it is placement order and decode order is settled from instantaneous gains.
  std::vector<std::vector<int>> channels;
  std::vector<int> channel_of;  // -1 when the device was not scheduled
  std::vector<int> rank;        // CRS: 1-based rank of the channel's first occupant, 0 otherwise
  std::vector<double> weight;   // transmit power weight
};

/// Random rounds: each round matches min(remaining, N) random devices one-to-one with a random
/// permutation of the channels, until every device is placed or L rounds are done.
Assignment rrs_assign(long K, int N, int L, Rng& rng);

enum class PowerPolicy { fixed, theorem4 };

/// NOMA power weights for the pair sharing the channel of rank i.
struct PowerCoefficients {
  double a = 0.0;
  double b = 0.0;
};

/// Equal-reliability weights: a_i = delta Y / (X + Y), b_i = delta - a_i with
/// X = (1/theta + mu)(psi(K+1) - psi(i)) and Y = (1 + 1/theta)(psi(K+1) - psi(i+N)).
/// Throws domain_error when the combination is infeasible (i + N > K or a bad denominator).
PowerCoefficients power_coefficients(int i, long K, int N, double theta, double mu, double delta);

/// Per-rank power weights used by every CRS cluster.
class PowerControl {
 public:
  /// a = fixed_a_fraction * delta for every rank.
  static PowerControl fixed(int N, double delta, double fixed_a_fraction = 0.5);
  /// power_coefficients per (i, K); tables are precomputed for N < K <= k_cap.
  static PowerControl theorem4(int N, double theta, double mu, double delta, long k_cap);

  PowerPolicy policy() const { return policy_; }
  double delta() const { return delta_; }
  double fixed_a_fraction() const { return fixed_a_fraction_; }
  std::optional<double> delta_star;

  /// Coefficients of the pair on the rank-i channel when the cluster holds K devices.
  PowerCoefficients coefficients(int i, long K) const;
  /// a_i for i = 1..min(K - N, N).
  std::vector<double> a_by_rank(long K) const;

 private:
  PowerPolicy policy_ = PowerPolicy::fixed;
  double delta_ = 1.0;
  double fixed_a_fraction_ = 0.5;
  int N_ = 0;
  double theta_ = 1.0;
  double mu_ = 0.0;
  long k_cap_ = 0;
  std::vector<std::vector<double>> table_;  // table_[K - N - 1][i - 1]
};

/// CRS: rank devices by descending gain (ties by index). Rank r <= N goes to channel r; for L = 2
/// rank r + N joins channel r. Sharers get weights (a_r, b_r) from power, sole occupants 1.
Assignment crs_assign(std::span<const double> gains, int N, int L, const PowerControl* power = nullptr);

struct DeltaStar {
  double delta = 1.0;
  double residual = 0.0;
  bool degenerate = false;
};

/// Root of xi^(d^(2/alpha) - 1) + xi^(2^((alpha-2)/alpha) d^(2/alpha) - 1) = 2,
/// xi = exp(-chi c2 s^(2/alpha)), by bisection over [2^((2-alpha)/2), 1].
/// alpha == 2 returns 1. No sign change on the bracket returns the midpoint flagged degenerate.
DeltaStar delta_star(const NetworkParams& params, double s, double c2);
/// Evaluated at s = theta with c2 from the occupancy PMF.
DeltaStar delta_star(const NetworkParams& params);

/// Left side minus 2 of the coexistence equation.
double delta_star_residual(double delta, double alpha, double xi);

}  // namespace aggsched
