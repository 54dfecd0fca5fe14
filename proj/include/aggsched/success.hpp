#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "aggsched/laplace.hpp"
#include "aggsched/occupancy.hpp"
#include "aggsched/scheduling.hpp"

namespace aggsched {

/// RRS success of the j-th decoded device on a channel holding u devices, (j, u) in
/// {(1,1), (1,2), (2,2)}. Uses laplace(model, ., model.params.delta).
double rrs_success(int j, int u, double theta, double mu, const LaplaceModel& model);

/// c1/(1-c0) p11 + c2/(2(1-c0)) (p12 + p22). Throws domain_error when c0 == 1.
double rrs_overall_success(const OccupancyPMF& pmf, double p11, double p12, double p22);

/// Mean number of successful devices per cluster under RRS. L = 2 uses
/// p11 (A1 + A2) + (p12 + p22)(A3 - A2) with A3 = N (1 - Q(N+1, m)); L = 1 uses p11 E[min(K, N)].
double rrs_avg_served(const NetworkParams& params, double p11, double p12, double p22);

/// Closed-form terms of the served-device count.
struct ServedTerms {
  double A1 = 0.0;  // sum_{k<=N} k Pr(K=k)
  double A2 = 0.0;
  double A3 = 0.0;  // N Pr(K > N)
};
ServedTerms served_terms(double m_bar, int N);

/// Location term B_{j,u}^{(i,K)} from the digamma differences psi(K+1)-psi(i) and psi(K+1)-psi(i+N).
double b_term(int j, int u, int i, long K, int N, double theta, double mu, double a, double b);

/// Parameters of the substituted Gil-Pelaez integral for the weighted CRS transform.
struct GilPelaezTerms {
  std::array<double, 2> nu{};
  std::array<double, 2> sigma{};
  std::array<double, 2> rho{};
  double B = 0.0;
};
GilPelaezTerms gil_pelaez_terms(const LaplaceModel& model, double delta, double B);

/// 1/2 - sum_t beta_{t-1} integrate_gil_pelaez(sigma_t, rho_t, B, alpha), clamped to [0, 1].
/// Clamps are counted in crs_clamp_events() and reported through *clamped when given.
double crs_rank_success(const GilPelaezTerms& terms, const LaplaceModel& model, bool* clamped = nullptr);
/// Same quantity from the complex transform, 1/2 - (1/pi) int Im{L(-i phi) e^{-i phi B}} / phi,
/// without clamping. Used as an independent check.
double crs_rank_success_direct(const LaplaceModel& model, double delta, double B);
/// Rank success with B built from power: (j, u) in {(1,1), (1,2), (2,2)}.
double crs_rank_success(int j, int u, int i, long K, const NetworkParams& params, const PowerControl& power,
                        const LaplaceModel& model, bool* clamped = nullptr);

/// Total number of clamped CRS rank probabilities in this process.
std::size_t crs_clamp_events();

struct RrsAnalysis {
  OccupancyPMF pmf;
  double p11 = 0.0;
  double p12 = 0.0;
  double p22 = 0.0;
  double overall = 0.0;
  double avg_served = 0.0;
};
RrsAnalysis analyze_rrs(const NetworkParams& params, LaplaceVariant variant = LaplaceVariant::rrs_exact);

/// All CRS metrics for one parameter set. Sums over K stop at kmax_for_tail(m_bar, tau).
struct CrsAnalysis {
  OccupancyPMF pmf;
  double delta = 0.0;
  long kmax = 0;
  double p11r = 0.0;     // sole occupant when K <= N
  double p11c = 0.0;     // sole occupant, averaged over K in 1..2N-1
  double p12c = 0.0;     // NaN when Pr(K > N) == 0 or L == 1
  double p22c = 0.0;
  double overall = 0.0;
  double avg_served = 0.0;
  std::size_t clamped = 0;
};
CrsAnalysis analyze_crs(const NetworkParams& params, const PowerControl& power, double tau = 1e-5);

double crs_conditional_success(int j, int u, const NetworkParams& params, const PowerControl& power,
                               double tau = 1e-5);
double crs_overall_success(const NetworkParams& params, const PowerControl& power, double tau = 1e-5);
double crs_avg_served(const NetworkParams& params, const PowerControl& power, double tau = 1e-5);

enum class PowerScheme { oma, hybrid };
/// Mean transmit power per channel: OMA (1 - c0) Psi, hybrid (c1 + delta c2) Psi.
double avg_power(const NetworkParams& params, const OccupancyPMF& pmf, PowerScheme scheme);

}  // namespace aggsched
