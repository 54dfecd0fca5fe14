#include "aggsched/success.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "aggsched/specfun.hpp"

namespace aggsched {

namespace {

std::atomic<std::size_t> g_clamp_events{0};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// exp(-m) m^n / n!
double pmf(long n, double m) { return poisson_pmf(n, m); }

}  // namespace

double rrs_success(int j, int u, double theta, double mu, const LaplaceModel& model) {
  if (!(theta > 0.0)) throw domain_error("rrs_success: theta must be positive");
  if (!(mu >= 0.0 && mu <= 1.0)) throw domain_error("rrs_success: mu must lie in [0, 1]");
  const double delta = model.params.delta;
  auto L = [&](double s) { return laplace(model, s, delta); };
  if (j == 1 && u == 1) return L(theta);
  if (j == 1 && u == 2) {
    if (theta < 1.0 && std::abs(1.0 - theta) >= 1e-12) {
      return 2.0 / (1.0 + theta) * L(theta) - (1.0 - theta) / (1.0 + theta) * L(2.0 * theta / (1.0 - theta));
    }
    return 2.0 / (1.0 + theta) * L(theta);
  }
  if (j == 2 && u == 2) {
    const double tm = theta * mu;
    if (tm >= 1.0) return 0.0;
    return (1.0 - tm) / (1.0 + tm) * L(2.0 * theta / (1.0 - tm));
  }
  throw domain_error("rrs_success: (j, u) must be (1,1), (1,2) or (2,2)");
}

double rrs_overall_success(const OccupancyPMF& pmf, double p11, double p12, double p22) {
  const double c0 = pmf.at(0);
  if (!(c0 < 1.0)) throw domain_error("rrs_overall_success: no active devices (c0 == 1)");
  return pmf.at(1) / (1.0 - c0) * p11 + pmf.at(2) / (2.0 * (1.0 - c0)) * (p12 + p22);
}

ServedTerms served_terms(double m, int N) {
  if (N < 1) throw domain_error("served_terms: N must be >= 1");
  if (!(m >= 0.0)) throw domain_error("served_terms: m_bar must be non-negative");
  ServedTerms t;
  if (m == 0.0) return t;
  const double q_n1 = regularized_gamma_q(N + 1.0, m);
  const double q_2n = regularized_gamma_q(2.0 * N, m);
  // exp(-m) m^(N+1) / N! and exp(-m) m^(2N) / (2N-1)!
  const double e_n1 = std::exp(-m + (N + 1.0) * std::log(m) - std::lgamma(N + 1.0));
  const double e_2n = std::exp(-m + 2.0 * N * std::log(m) - std::lgamma(2.0 * N));
  t.A1 = m * q_n1 - e_n1;
  t.A2 = (e_2n - e_n1) - (m - 2.0 * N) * (q_2n - q_n1);
  t.A3 = N * (1.0 - q_n1);
  return t;
}

double rrs_avg_served(const NetworkParams& params, double p11, double p12, double p22) {
  const auto t = served_terms(params.m_bar, params.N);
  if (params.L == 1) return p11 * (t.A1 + t.A3);
  if (params.L == 2) return p11 * (t.A1 + t.A2) + (p12 + p22) * (t.A3 - t.A2);
  throw domain_error("rrs_avg_served: closed form exists for L in {1, 2}");
}

double b_term(int j, int u, int i, long K, int N, double theta, double mu, double a, double b) {
  if (i < 1 || i > N) throw domain_error("b_term: rank i must lie in 1..N");
  if (K < i) throw domain_error("b_term: needs K >= i");
  if (!(theta > 0.0)) throw domain_error("b_term: theta must be positive");
  const double top = digamma(static_cast<double>(K) + 1.0);
  const double d_i = top - digamma(i);
  if (j == 1 && u == 1) return d_i / theta;
  if (u != 2 || (j != 1 && j != 2)) throw domain_error("b_term: (j, u) must be (1,1), (1,2) or (2,2)");
  if (K < static_cast<long>(i) + N) throw domain_error("b_term: u = 2 needs K >= i + N");
  const double d_iN = top - digamma(static_cast<double>(i) + N);
  if (j == 1) return a / theta * d_i - b * d_iN;
  return b / theta * d_iN - mu * a * d_i;
}

GilPelaezTerms gil_pelaez_terms(const LaplaceModel& model, double delta, double B) {
  GilPelaezTerms t;
  const double angle = std::numbers::pi / model.params.alpha;
  for (int k = 0; k < 2; ++k) {
    t.nu[k] = crs_nu(model, k + 1, delta);
    t.sigma[k] = t.nu[k] * std::cos(angle);
    t.rho[k] = t.nu[k] * std::sin(angle);
  }
  t.B = B;
  return t;
}

double crs_rank_success(const GilPelaezTerms& terms, const LaplaceModel& model, bool* clamped) {
  const std::array<double, 2> beta{model.params.beta0, model.params.beta1};
  double p = 0.5;
  for (int k = 0; k < 2; ++k) {
    if (beta[k] == 0.0) continue;
    p -= beta[k] * integrate_gil_pelaez(terms.sigma[k], terms.rho[k], terms.B, model.params.alpha);
  }
  const double c = std::clamp(p, 0.0, 1.0);
  const bool was_clamped = c != p;
  if (was_clamped) g_clamp_events.fetch_add(1, std::memory_order_relaxed);
  if (clamped != nullptr) *clamped = was_clamped;
  return c;
}

double crs_rank_success_direct(const LaplaceModel& model, double delta, double B) {
  const double nu1 = crs_nu(model, 1, delta);
  const double nu2 = crs_nu(model, 2, delta);
  if (nu1 == 0.0 && nu2 == 0.0) return B > 0.0 ? 1.0 : (B < 0.0 ? 0.0 : 0.5);
  const double alpha = model.params.alpha;
  auto f = [&](double phi) {
    if (phi <= 0.0) return 0.0;
    const std::complex<double> L = laplace_crs_weighted(model, {0.0, -phi}, delta);
    return std::imag(L * std::exp(std::complex<double>(0.0, -phi * B))) / phi;
  };
  const double width = 4.0 * std::numbers::pi / std::max(std::abs(B), 0.2);
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = ts.integrate(f, 0.0, width, 1e-12);
  const double slowest = std::min(nu1 == 0.0 ? nu2 : nu1, nu2 == 0.0 ? nu1 : nu2) * std::cos(std::numbers::pi / alpha);
  double lo = width;
  for (long k = 0; k < 5'000'000; ++k) {
    const double hi = lo + width;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 6, 1e-10);
    lo = hi;
    if (std::exp(-slowest * std::pow(lo, 2.0 / alpha)) * width / lo < 1e-12) break;
  }
  return 0.5 - total / std::numbers::pi;
}

double crs_rank_success(int j, int u, int i, long K, const NetworkParams& params, const PowerControl& power,
                        const LaplaceModel& model, bool* clamped) {
  double a = 0.0;
  double b = 0.0;
  if (u == 2) {
    const auto c = power.coefficients(i, K);
    a = c.a;
    b = c.b;
  }
  const double B = b_term(j, u, i, K, params.N, params.theta, params.mu, a, b);
  return crs_rank_success(gil_pelaez_terms(model, power.delta(), B), model, clamped);
}

std::size_t crs_clamp_events() { return g_clamp_events.load(std::memory_order_relaxed); }

RrsAnalysis analyze_rrs(const NetworkParams& params, LaplaceVariant variant) {
  params.validate();
  RrsAnalysis r;
  r.pmf = occupancy_pmf(params);
  const auto model = LaplaceModel::make(variant, params, r.pmf);
  r.p11 = rrs_success(1, 1, params.theta, params.mu, model);
  r.p12 = rrs_success(1, 2, params.theta, params.mu, model);
  r.p22 = rrs_success(2, 2, params.theta, params.mu, model);
  r.overall = r.pmf.at(0) < 1.0 ? rrs_overall_success(r.pmf, r.p11, r.p12, r.p22) : r.p11;
  r.avg_served = rrs_avg_served(params, r.p11, r.p12, r.p22);
  return r;
}

CrsAnalysis analyze_crs(const NetworkParams& params, const PowerControl& power, double tau) {
  params.validate();
  if (params.L > 2) throw domain_error("analyze_crs: CRS is defined for L in {1, 2}");
  CrsAnalysis r;
  r.pmf = occupancy_pmf(params);
  r.delta = power.delta();
  const auto model = LaplaceModel::make(LaplaceVariant::crs_weighted, params, r.pmf);
  const int N = params.N;
  const double m = params.m_bar;
  const double theta = params.theta;
  r.p11r = laplace_crs(model, theta, r.delta);
  r.kmax = kmax_for_tail(m, tau);

  auto rank = [&](int j, int u, int i, long K) {
    bool clamped = false;
    const double p = crs_rank_success(j, u, i, K, params, power, model, &clamped);
    if (clamped) ++r.clamped;
    return p;
  };

  double sole_num = 0.0;
  double pair_num[2] = {0.0, 0.0};
  double overall_num = 0.0;
  double served_num = 0.0;
  for (long k = N + 1; k <= r.kmax; ++k) {
    const double w = pmf(k, m);
    if (w == 0.0) continue;
    const int shared = params.L == 2 ? static_cast<int>(std::min<long>(k - N, N)) : 0;
    double s11 = 0.0;
    double s12 = 0.0;
    double s22 = 0.0;
    for (int i = shared + 1; i <= N; ++i) s11 += rank(1, 1, i, k);
    for (int i = 1; i <= shared; ++i) {
      s12 += rank(1, 2, i, k);
      s22 += rank(2, 2, i, k);
    }
    served_num += w * (s11 + s12 + s22);
    if (params.L == 1) {
      sole_num += w * s11 / N;
      overall_num += w * s11 / N;
    } else if (k <= 2L * N - 1) {
      sole_num += w * s11 / static_cast<double>(2 * N - k);
      pair_num[0] += w * s12 / static_cast<double>(k - N);
      pair_num[1] += w * s22 / static_cast<double>(k - N);
      overall_num += w * (s11 + s12 + s22) / static_cast<double>(k);
    } else {
      pair_num[0] += w * s12 / N;
      pair_num[1] += w * s22 / N;
      overall_num += w * (s12 + s22) / (2.0 * N);
    }
  }

  const double p0 = std::exp(-m);
  const double active = -std::expm1(-m);
  const double low = std::max(0.0, regularized_gamma_q(N + 1.0, m) - p0);  // Pr(1 <= K <= N)
  const double above = 1.0 - regularized_gamma_q(N + 1.0, m);             // Pr(K > N)
  if (params.L == 1) {
    r.p11c = active > 0.0 ? (low * r.p11r + sole_num) / active : r.p11r;
    r.p12c = kNaN;
    r.p22c = kNaN;
  } else {
    const double sole_mass = std::max(0.0, regularized_gamma_q(2.0 * N, m) - p0);  // Pr(1 <= K <= 2N-1)
    r.p11c = sole_mass > 0.0 ? (low * r.p11r + sole_num) / sole_mass : r.p11r;
    r.p12c = above > 0.0 ? pair_num[0] / above : kNaN;
    r.p22c = above > 0.0 ? pair_num[1] / above : kNaN;
  }
  r.overall = active > 0.0 ? (low * r.p11r + overall_num) / active : r.p11r;
  r.avg_served = r.p11r * served_terms(m, N).A1 + served_num;
  return r;
}

double crs_conditional_success(int j, int u, const NetworkParams& params, const PowerControl& power, double tau) {
  const auto r = analyze_crs(params, power, tau);
  if (j == 1 && u == 1) return r.p11c;
  if (j == 1 && u == 2) return r.p12c;
  if (j == 2 && u == 2) return r.p22c;
  throw domain_error("crs_conditional_success: (j, u) must be (1,1), (1,2) or (2,2)");
}

double crs_overall_success(const NetworkParams& params, const PowerControl& power, double tau) {
  return analyze_crs(params, power, tau).overall;
}

double crs_avg_served(const NetworkParams& params, const PowerControl& power, double tau) {
  return analyze_crs(params, power, tau).avg_served;
}

double avg_power(const NetworkParams& params, const OccupancyPMF& pmf, PowerScheme scheme) {
  const double psi = mean_inversion_power(params);
  if (scheme == PowerScheme::oma) return (1.0 - pmf.at(0)) * psi;
  return (pmf.at(1) + params.delta * pmf.at(2)) * psi;
}

}  // namespace aggsched
