// Acceptance checks: one PASS/FAIL line per criterion. Tolerances and run counts are fixed here.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "aggsched/laplace.hpp"
#include "aggsched/montecarlo.hpp"
#include "aggsched/occupancy.hpp"
#include "aggsched/scheduling.hpp"
#include "aggsched/success.hpp"

using namespace aggsched;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s; %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
              secs, budget_s, in_time ? "" : " over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<double> s_grid_db() {
  std::vector<double> s;
  for (int db = -20; db <= 20; ++db) s.push_back(std::pow(10.0, db / 10.0));
  return s;
}

const OccupancyPMF kPairs = OccupancyPMF::from_probabilities({0.0, 0.0, 1.0});

NetworkParams with_alpha(double alpha) {
  NetworkParams p;
  p.alpha = alpha;
  return p;
}

SimConfig sim(SimScheme scheme, long runs, std::uint64_t seed) {
  SimConfig c;
  c.scheme = scheme;
  c.runs = runs;
  c.seed = seed;
  return c;
}

// Shared between criteria 7, 8 and 10.
constexpr long kCrossRuns = 50000;
NetworkParams g_crs_params;
MetricReport g_crs;
MetricReport g_rrs;
bool g_crs_done = false;

}  // namespace

int main() {
  std::printf("acceptance: hardware threads = %u\n", std::max(1u, std::thread::hardware_concurrency()));

  report(1, "occupancy closed form vs Poisson mixture", 5.0, [] {
    constexpr double kTol = 1e-10;
    double worst = 0.0;
    for (int N = 2; N <= 10; ++N) {
      for (int L = 1; L <= 4; ++L) {
        for (int step = 1; step <= 40; ++step) {
          const double m = 0.5 * step;
          std::vector<double> ref(L + 1, 0.0);
          // Sum until the remaining Poisson tail is below 1e-12.
          double pk = std::exp(-m);
          double cdf = 0.0;
          for (long k = 0; k == 0 || 1.0 - cdf >= 1e-12 || k <= m; ++k) {
            if (k > 0) pk *= m / static_cast<double>(k);
            cdf += pk;
            const auto cond = conditional_occupancy(k, N, L);
            for (int u = 0; u <= L; ++u) ref[u] += pk * cond[u];
          }
          const auto closed = occupancy_pmf(m, N, L);
          for (int u = 0; u <= L; ++u) worst = std::max(worst, std::abs(closed.c[u] - ref[u]));
        }
      }
    }
    const auto ex = conditional_occupancy(26, 10, 4);
    const bool example = ex[2] == 0.4 && ex[3] == 0.6 && ex[0] == 0.0 && ex[1] == 0.0 && ex[4] == 0.0;
    return Outcome{worst <= kTol && example,
                   fmt("max |closed - mixture| = %.2e (tol %.0e); (k=26,N=10,L=4) -> U=2: %.17g, U=3: %.17g", worst,
                       kTol, ex[2], ex[3])};
  });

  report(2, "k_max rule", 1.0, [] {
    const long k = kmax_for_tail(30.0, 1e-5);
    return Outcome{k == 56, fmt("kmax(30, 1e-5) = %ld (expected 56)", k)};
  });

  report(3, "Laplace bound ordering and weighted approximation", 120.0, [] {
    constexpr double kRelTol = 0.05;
    bool ordered = true;
    double worst_rel = 0.0;
    double worst_alpha = 0.0;
    double worst_db = 0.0;
    std::string per_alpha;
    for (double alpha : {3.0, 3.6, 5.0}) {
      double alpha_worst = 0.0;
      const NetworkParams p = with_alpha(alpha);
      const auto ex = LaplaceModel::make(LaplaceVariant::rrs_exact, p, kPairs);
      const auto up = LaplaceModel::make(LaplaceVariant::rrs_upper, p, kPairs);
      const auto lo = LaplaceModel::make(LaplaceVariant::rrs_lower, p, kPairs);
      const auto w = LaplaceModel::make(LaplaceVariant::rrs_weighted, p, kPairs);
      for (double s : {0.01, 0.1, 1.0}) {
        const double e = laplace_rrs(ex, s);
        ordered = ordered && laplace_rrs(lo, s) <= e && e <= laplace_rrs(up, s);
      }
      for (int db = -20; db <= 20; ++db) {
        const double s = std::pow(10.0, db / 10.0);
        const double e = laplace_rrs(ex, s);
        const double rel = std::abs(laplace_rrs(w, s) - e) / e;
        alpha_worst = std::max(alpha_worst, rel);
        if (rel > worst_rel) {
          worst_rel = rel;
          worst_alpha = alpha;
          worst_db = db;
        }
      }
      per_alpha += fmt("%s%g:%.4f", per_alpha.empty() ? "" : " ", alpha, alpha_worst);
    }
    return Outcome{ordered && worst_rel <= kRelTol,
                   fmt("lower <= exact <= upper at s in {0.01,0.1,1}: %s; max |approx/exact - 1| = %.4f at alpha=%g, "
                       "s=%g dB (tol %.2f); worst by alpha {%s}",
                       ordered ? "yes" : "no", worst_rel, worst_alpha, worst_db, kRelTol, per_alpha.c_str())};
  });

  report(4, "CRS weighted transform at delta = 2 equals the RRS approximation", 1.0, [] {
    constexpr double kTol = 1e-12;
    double worst = 0.0;
    for (double alpha : {3.0, 3.6, 5.0}) {
      const NetworkParams p = with_alpha(alpha);
      for (const OccupancyPMF& pmf : {kPairs, occupancy_pmf(p)}) {
        const auto crs = LaplaceModel::make(LaplaceVariant::crs_weighted, p, pmf);
        const auto rrs = LaplaceModel::make(LaplaceVariant::rrs_weighted, p, pmf);
        for (double s : s_grid_db()) worst = std::max(worst, std::abs(laplace_crs(crs, s, 2.0) - laplace_rrs(rrs, s)));
      }
    }
    return Outcome{worst <= kTol, fmt("max |CRS weighted(delta=2) - RRS weighted| = %.2e (tol %.0e)", worst, kTol)};
  });

  report(5, "Gil-Pelaez inversion sanity", 30.0, [] {
    constexpr double kLimitTol = 1e-3;
    constexpr double kDirectTol = 1e-6;
    NetworkParams quiet;
    quiet.lambda_a = 1e-14;
    const auto mq = LaplaceModel::make(LaplaceVariant::crs_weighted, quiet);
    double limit_err = 0.0;
    for (double B : {0.01, 0.1, 1.0, 10.0}) {
      limit_err = std::max(limit_err, std::abs(crs_rank_success(gil_pelaez_terms(mq, 1.0, B), mq) - 1.0));
      limit_err = std::max(limit_err, std::abs(crs_rank_success(gil_pelaez_terms(mq, 1.0, -B), mq) - 0.0));
    }
    // 20 spot points: two budgets, ten locations, defaults otherwise.
    const NetworkParams p;
    const auto m = LaplaceModel::make(LaplaceVariant::crs_weighted, p);
    double direct_err = 0.0;
    int points = 0;
    for (double delta : {0.7444, 1.0}) {
      for (double B : {0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.5, 4.0}) {
        const double gp = crs_rank_success(gil_pelaez_terms(m, delta, B), m);
        direct_err = std::max(direct_err, std::abs(gp - crs_rank_success_direct(m, delta, B)));
        ++points;
      }
    }
    return Outcome{limit_err <= kLimitTol && direct_err <= kDirectTol,
                   fmt("interference-free max error %.2e (tol %.0e); production vs direct max |diff| = %.2e over %d "
                       "points (tol %.0e)",
                       limit_err, kLimitTol, direct_err, points, kDirectTol)};
  });

  report(6, "delta* bracket", 1.0, [] {
    constexpr double kResidualTol = 1e-9;
    bool ok = true;
    std::string values;
    for (double alpha : {2.5, 3.0, 3.6, 4.0, 5.0}) {
      const DeltaStar d = delta_star(with_alpha(alpha));
      const double lo = std::pow(2.0, (2.0 - alpha) / 2.0);
      ok = ok && !d.degenerate && d.delta >= lo && d.delta <= 1.0 && std::abs(d.residual) <= kResidualTol;
      values += fmt("%s%g:%.6f", values.empty() ? "" : " ", alpha, d.delta);
    }
    // Approach to alpha = 2 from above.
    double prev_gap = 1.0;
    bool approaches = true;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
      const double gap = 1.0 - delta_star(with_alpha(2.0 + eps)).delta;
      approaches = approaches && gap >= 0.0 && gap <= prev_gap;
      prev_gap = gap;
    }
    approaches = approaches && prev_gap <= 1e-6;
    return Outcome{ok && approaches, fmt("delta* by alpha {%s}, residual tol %.0e; 1 - delta*(2 + 1e-6) = %.2e",
                                         values.c_str(), kResidualTol, prev_gap)};
  });

  auto run_cross = [] {
    if (g_crs_done) return;
    g_crs_params = NetworkParams{};
    g_crs_params.delta = delta_star(g_crs_params).delta;
    g_crs = estimate_metrics(g_crs_params, sim(SimScheme::crs_theorem4, kCrossRuns, 20240601));
    g_rrs = estimate_metrics(NetworkParams{}, sim(SimScheme::rrs, kCrossRuns, 20240602));
    g_crs_done = true;
  };

  report(7, "CRS fairness between paired decoding positions", 600.0, [&] {
    constexpr double kTol = 0.05;
    run_cross();
    const double gap = std::abs(g_crs.p12.value - g_crs.p22.value);
    return Outcome{gap <= kTol, fmt("runs=%ld delta*=%.6f p12=%.4f p22=%.4f |gap|=%.4f (tol %.2f)", g_crs.runs,
                                    g_crs_params.delta, g_crs.p12.value, g_crs.p22.value, gap, kTol)};
  });

  report(8, "analytic vs simulation", 900.0, [&] {
    constexpr double kRrs11 = 0.02, kRrs2 = 0.03, kCrs11 = 0.03, kCrs2 = 0.05;
    run_cross();
    const RrsAnalysis r = analyze_rrs(NetworkParams{});
    const auto power = make_power_control(g_crs_params, SimScheme::crs_theorem4, 0.5);
    const CrsAnalysis c = analyze_crs(g_crs_params, *power);
    const double d[6] = {std::abs(g_rrs.p11.value - r.p11),  std::abs(g_rrs.p12.value - r.p12),
                         std::abs(g_rrs.p22.value - r.p22),  std::abs(g_crs.p11.value - c.p11c),
                         std::abs(g_crs.p12.value - c.p12c), std::abs(g_crs.p22.value - c.p22c)};
    const bool ok = d[0] <= kRrs11 && d[1] <= kRrs2 && d[2] <= kRrs2 && d[3] <= kCrs11 && d[4] <= kCrs2 &&
                    d[5] <= kCrs2;
    return Outcome{ok, fmt("RRS |d11|=%.4f |d12|=%.4f |d22|=%.4f (tol %.2f/%.2f); CRS |d11|=%.4f |d12|=%.4f "
                           "|d22|=%.4f (tol %.2f/%.2f); runs=%ld",
                           d[0], d[1], d[2], kRrs11, kRrs2, d[3], d[4], d[5], kCrs11, kCrs2, kCrossRuns)};
  });

  report(9, "hybrid CRS serves more devices than OMA CRS", 900.0, [] {
    constexpr long kRuns = 20000;
    constexpr std::uint64_t kSeed = 777;
    NetworkParams p;
    p.N = 20;
    p.m_bar = 60.0;
    NetworkParams oma = p;
    oma.L = 1;
    const MetricReport one = estimate_metrics(oma, sim(SimScheme::crs_fixed, kRuns, kSeed));
    p.delta = delta_star(p).delta;
    std::string detail = fmt("L=1: p=%.4f Kbar=%.3f", one.overall.value, one.avg_served.value);
    bool ok = true;
    for (SimScheme scheme : {SimScheme::crs_fixed, SimScheme::crs_theorem4}) {
      const MetricReport two = estimate_metrics(p, sim(scheme, kRuns, kSeed));
      const bool premise = two.overall.value > 0.5 * one.overall.value;
      const bool more = two.avg_served.value > one.avg_served.value;
      if (premise && !more) ok = false;
      detail += fmt("; L=2 %s: p=%.4f Kbar=%.3f premise %s", to_string(scheme), two.overall.value,
                    two.avg_served.value, premise ? "holds" : "fails");
    }
    return Outcome{ok, detail + fmt("; runs=%ld each, same seed", kRuns)};
  });

  report(10, "mean transmit power per channel", 300.0, [&] {
    constexpr double kRelTol = 0.01;
    constexpr double kRatioTol = 0.02;
    run_cross();
    const NetworkParams def;
    NetworkParams oma_p = def;
    oma_p.L = 1;
    const MetricReport oma = estimate_metrics(def, sim(SimScheme::oma, 20000, 99));
    const double oma_expect = avg_power(oma_p, occupancy_pmf(oma_p), PowerScheme::oma);
    const double hyb_expect = avg_power(g_crs_params, occupancy_pmf(g_crs_params), PowerScheme::hybrid);
    NetworkParams rrs_p = def;
    rrs_p.delta = 2.0;
    const double rrs_expect = avg_power(rrs_p, occupancy_pmf(rrs_p), PowerScheme::hybrid);
    const double e_oma = std::abs(oma.power_per_channel.value / oma_expect - 1.0);
    const double e_hyb = std::abs(g_crs.power_per_channel.value / hyb_expect - 1.0);
    const double e_rrs = std::abs(g_rrs.power_per_channel.value / rrs_expect - 1.0);

    // Saturated clusters: Pr(K < 2N) is about 1e-10 for N = 10, m_bar = 60, so c0 = 0 and c2 = 1.
    NetworkParams sat;
    sat.N = 10;
    NetworkParams sat_oma = sat;
    sat_oma.L = 1;
    const MetricReport base = estimate_metrics(sat_oma, sim(SimScheme::oma, 10000, 5));
    sat.delta = 2.0;
    const MetricReport doubled = estimate_metrics(sat, sim(SimScheme::crs_fixed, 10000, 5));
    sat.delta = delta_star(sat).delta;
    const MetricReport neutral = estimate_metrics(sat, sim(SimScheme::crs_fixed, 10000, 5));
    const double r2 = doubled.power_per_channel.value / base.power_per_channel.value;
    const double rs = neutral.power_per_channel.value / base.power_per_channel.value;
    const bool ok = e_oma <= kRelTol && e_hyb <= kRelTol && e_rrs <= kRelTol && std::abs(r2 - 2.0) <= kRatioTol &&
                    rs < 1.0;
    return Outcome{ok, fmt("rel err OMA %.4f, hybrid delta* %.4f, RRS %.4f (tol %.2f); c2=1 ratio delta=2: %.4f "
                           "(tol +-%.2f), delta*=%.4f: %.4f (< 1)",
                           e_oma, e_hyb, e_rrs, kRelTol, r2, kRatioTol, sat.delta, rs)};
  });

  report(11, "imperfect SIC with theta mu >= 1", 300.0, [] {
    constexpr long kRuns = 5000;
    bool ok = true;
    std::string detail;
    for (const auto& [theta, mu] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
      NetworkParams p;
      p.theta = theta;
      p.mu = mu;
      const double analytic = analyze_rrs(p).p22;
      const MetricReport r = estimate_metrics(p, sim(SimScheme::rrs, kRuns, 11));
      const double bound = 3.0 / kRuns;
      ok = ok && analytic == 0.0 && r.p22.value <= bound;
      detail += fmt("%stheta=%g mu=%g: analytic p22=%g, simulated %.2e (<= %.1e)", detail.empty() ? "" : "; ", theta,
                    mu, analytic, r.p22.value, bound);
    }
    return Outcome{ok, detail};
  });

  std::printf("acceptance: %d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
