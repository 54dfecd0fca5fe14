#include "aggsched/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aggsched/occupancy.hpp"
#include "aggsched/specfun.hpp"

namespace aggsched {

namespace {

Assignment empty_assignment(long K, int N) {
  Assignment a;
  a.channels.assign(static_cast<std::size_t>(N), {});
  a.channel_of.assign(static_cast<std::size_t>(K), -1);
  a.rank.assign(static_cast<std::size_t>(K), 0);
  a.weight.assign(static_cast<std::size_t>(K), 1.0);
  return a;
}

}  // namespace

Assignment rrs_assign(long K, int N, int L, Rng& rng) {
  if (K < 0) throw domain_error("rrs_assign: K must be >= 0");
  if (N < 1 || L < 1) throw domain_error("rrs_assign: N and L must be >= 1");
  Assignment out = empty_assignment(K, N);
  std::vector<int> devices(static_cast<std::size_t>(K));
  std::iota(devices.begin(), devices.end(), 0);
  std::shuffle(devices.begin(), devices.end(), rng);
  std::vector<int> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), 0);
  long next = 0;
  for (int round = 0; round < L && next < K; ++round) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int n = 0; n < N && next < K; ++n, ++next) {
      const int d = devices[static_cast<std::size_t>(next)];
      out.channels[perm[n]].push_back(d);
      out.channel_of[d] = perm[n];
    }
  }
  return out;
}

PowerCoefficients power_coefficients(int i, long K, int N, double theta, double mu, double delta) {
  if (N < 1 || i < 1 || i > N) throw domain_error("power_coefficients: rank i must lie in 1..N");
  if (K <= N) throw domain_error("power_coefficients: needs K > N");
  if (!(theta > 0.0)) throw domain_error("power_coefficients: theta must be positive");
  if (!(mu >= 0.0 && mu < 1.0)) throw domain_error("power_coefficients: mu must lie in [0, 1)");
  if (!(delta > 0.0)) throw domain_error("power_coefficients: delta must be positive");
  const double top = digamma(static_cast<double>(K) + 1.0);
  const double x = (1.0 / theta + mu) * (top - digamma(i));
  const double y = (1.0 + 1.0 / theta) * (top - digamma(static_cast<double>(i) + N));
  if (!(y > 0.0) || !(x + y > 0.0)) {
    throw domain_error("power_coefficients: infeasible (i, K, N) combination, the rank-i channel has no sharer");
  }
  const double a = delta * y / (x + y);
  return {a, delta - a};
}

PowerControl PowerControl::fixed(int N, double delta, double fixed_a_fraction) {
  if (N < 1) throw domain_error("PowerControl: N must be >= 1");
  if (!(delta > 0.0)) throw domain_error("PowerControl: delta must be positive");
  if (!(fixed_a_fraction > 0.0 && fixed_a_fraction < 1.0)) {
    throw domain_error("PowerControl: fixed_a_fraction must lie in (0, 1)");
  }
  PowerControl pc;
  pc.policy_ = PowerPolicy::fixed;
  pc.delta_ = delta;
  pc.fixed_a_fraction_ = fixed_a_fraction;
  pc.N_ = N;
  return pc;
}

PowerControl PowerControl::theorem4(int N, double theta, double mu, double delta, long k_cap) {
  if (!(delta > 0.0)) throw domain_error("PowerControl: delta must be positive");
  if (N < 1) throw domain_error("PowerControl: N must be >= 1");
  PowerControl pc;
  pc.policy_ = PowerPolicy::theorem4;
  pc.delta_ = delta;
  pc.N_ = N;
  pc.theta_ = theta;
  pc.mu_ = mu;
  pc.k_cap_ = std::max<long>(k_cap, N);
  for (long K = N + 1; K <= pc.k_cap_; ++K) {
    const int shared = static_cast<int>(std::min<long>(K - N, N));
    std::vector<double> row(static_cast<std::size_t>(shared));
    for (int i = 1; i <= shared; ++i) row[i - 1] = power_coefficients(i, K, N, theta, mu, delta).a;
    pc.table_.push_back(std::move(row));
  }
  return pc;
}

PowerCoefficients PowerControl::coefficients(int i, long K) const {
  if (policy_ == PowerPolicy::fixed) {
    const double a = fixed_a_fraction_ * delta_;
    return {a, delta_ - a};
  }
  if (K > N_ && K <= k_cap_ && i >= 1 && i <= static_cast<int>(table_[K - N_ - 1].size())) {
    const double a = table_[K - N_ - 1][i - 1];
    return {a, delta_ - a};
  }
  return power_coefficients(i, K, N_, theta_, mu_, delta_);
}

std::vector<double> PowerControl::a_by_rank(long K) const {
  std::vector<double> a;
  const long shared = std::min<long>(std::max<long>(K - N_, 0), N_);
  for (int i = 1; i <= shared; ++i) a.push_back(coefficients(i, K).a);
  return a;
}

Assignment crs_assign(std::span<const double> gains, int N, int L, const PowerControl* power) {
  if (N < 1) throw domain_error("crs_assign: N must be >= 1");
  if (L < 1 || L > 2) throw domain_error("crs_assign: CRS is defined for L in {1, 2}");
  const long K = static_cast<long>(gains.size());
  Assignment out = empty_assignment(K, N);
  std::vector<int> order(gains.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return gains[x] > gains[y]; });
  const long first = std::min<long>(K, N);
  for (long r = 0; r < first; ++r) {
    const int d = order[r];
    out.channels[r].push_back(d);
    out.channel_of[d] = static_cast<int>(r);
    out.rank[d] = static_cast<int>(r + 1);
  }
  if (L == 2) {
    const long shared = std::min<long>(std::max<long>(K - N, 0), N);
    for (long r = 0; r < shared; ++r) {
      const int lead = order[r];
      const int d = order[r + N];
      out.channels[r].push_back(d);
      out.channel_of[d] = static_cast<int>(r);
      out.rank[d] = static_cast<int>(r + 1);
      if (power != nullptr) {
        const auto c = power->coefficients(static_cast<int>(r + 1), K);
        out.weight[lead] = c.a;
        out.weight[d] = c.b;
      }
    }
  }
  return out;
}

double delta_star_residual(double delta, double alpha, double xi) {
  const double d = std::pow(delta, 2.0 / alpha);
  const double k = std::pow(2.0, (alpha - 2.0) / alpha);
  return std::pow(xi, d - 1.0) + std::pow(xi, k * d - 1.0) - 2.0;
}

DeltaStar delta_star(const NetworkParams& params, double s, double c2) {
  if (!(s > 0.0)) throw domain_error("delta_star: s must be positive");
  if (!(c2 >= 0.0 && c2 <= 1.0)) throw domain_error("delta_star: c2 must lie in [0, 1]");
  const double alpha = params.alpha;
  if (alpha == 2.0) return {1.0, 0.0, false};
  if (!(alpha > 2.0)) throw domain_error("delta_star: alpha must be >= 2");
  const double xi = std::exp(-chi(params) * c2 * std::pow(s, 2.0 / alpha));
  double lo = std::pow(2.0, (2.0 - alpha) / 2.0);
  double hi = 1.0;
  const double f_lo = delta_star_residual(lo, alpha, xi);
  const double f_hi = delta_star_residual(hi, alpha, xi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    const double mid = 0.5 * (lo + hi);
    return {mid, delta_star_residual(mid, alpha, xi), true};
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (delta_star_residual(mid, alpha, xi) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  return {root, delta_star_residual(root, alpha, xi), false};
}

DeltaStar delta_star(const NetworkParams& params) {
  return delta_star(params, params.theta, occupancy_pmf(params).at(2));
}

}  // namespace aggsched
