#include "aggsched/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

namespace aggsched {

const char* to_string(SimScheme s) {
  switch (s) {
    case SimScheme::oma: return "oma";
    case SimScheme::rrs: return "rrs";
    case SimScheme::crs_fixed: return "crs_fixed";
    case SimScheme::crs_theorem4: return "crs_theorem4";
  }
  return "unknown";
}

SimScheme sim_scheme_from_string(const std::string& name) {
  for (auto s : {SimScheme::oma, SimScheme::rrs, SimScheme::crs_fixed, SimScheme::crs_theorem4}) {
    if (name == to_string(s)) return s;
  }
  throw domain_error("unknown scheme '" + name + "' (expected oma, rrs, crs_fixed or crs_theorem4)");
}

bool is_crs(SimScheme s) { return s == SimScheme::crs_fixed || s == SimScheme::crs_theorem4; }

namespace {

int effective_L(const NetworkParams& p, SimScheme s) { return s == SimScheme::oma ? 1 : p.L; }

double window_area(const NetworkParams& p, const SimConfig& c) { return c.expected_aggregators / p.lambda_a; }

// 53-bit uniform on [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Unit exponential by inversion; 1 - u lies in (0, 1].
inline double unit_exponential(Rng& rng) { return -std::log(1.0 - uniform01(rng)); }

// Uniform integer in [0, n) (Lemire's multiply-shift with rejection).
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform point in the disc of radius R by rejection from the bounding square.
inline void disc_point(double R, Rng& rng, double& x, double& y) {
  do {
    x = 2.0 * uniform01(rng) - 1.0;
    y = 2.0 * uniform01(rng) - 1.0;
  } while (x * x + y * y > 1.0);
  x *= R;
  y *= R;
}

class PoissonSampler {
 public:
  explicit PoissonSampler(double mean) : mean_(mean), dist_(mean > 0.0 ? mean : 1.0) {}
  long operator()(Rng& rng) { return mean_ > 0.0 ? dist_(rng) : 0; }

 private:
  double mean_;
  std::poisson_distribution<long> dist_;
};

// First n entries of perm become a uniformly random arrangement (partial Fisher-Yates).
void partial_shuffle(std::vector<int>& perm, int n, Rng& rng) {
  const int size = static_cast<int>(perm.size());
  for (int s = 0; s < n && s < size - 1; ++s) {
    const auto pick = s + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(size - s)));
    std::swap(perm[s], perm[pick]);
  }
}

}  // namespace

void SimConfig::validate(const NetworkParams& params) const {
  if (runs < 1) throw domain_error("SimConfig: runs must be >= 1");
  if (!(expected_aggregators > 0.0)) throw domain_error("SimConfig: expected_aggregators must be positive");
  const double area = window_area(params, *this);
  const double disc = std::numbers::pi * 4.0 * params.R_a * params.R_a;
  if (!(area > disc)) throw domain_error("SimConfig: window area must exceed pi (2 R_a)^2");
  if (is_crs(scheme) && params.L > 2) throw domain_error("SimConfig: CRS is defined for L in {1, 2}");
  if (!(fixed_a_fraction > 0.0 && fixed_a_fraction < 1.0)) {
    throw domain_error("SimConfig: fixed_a_fraction must lie in (0, 1)");
  }
  if (threads < 0) throw domain_error("SimConfig: threads must be >= 0");
}

void sample_realization(const NetworkParams& params, const SimConfig& config, const PowerControl* power, Rng& rng,
                        Realization& out) {
  const double area = window_area(params, config);
  out.side = std::sqrt(area);
  const int N = params.N;
  const int L = effective_L(params, config.scheme);
  const bool crs = is_crs(config.scheme);
  if (crs && L == 2 && power == nullptr) throw domain_error("sample_realization: CRS with L = 2 needs power control");

  const long others = PoissonSampler(params.lambda_a * area)(rng);
  PoissonSampler devices(params.m_bar);
  const std::size_t n_agg = static_cast<std::size_t>(others) + 1;
  out.agg_x.assign(n_agg, 0.0);
  out.agg_y.assign(n_agg, 0.0);
  out.K.assign(n_agg, 0);
  out.first.assign(n_agg + 1, 0);
  out.K[0] = devices(rng);
  for (std::size_t c = 1; c < n_agg; ++c) {
    out.agg_x[c] = (uniform01(rng) - 0.5) * out.side;
    out.agg_y[c] = (uniform01(rng) - 0.5) * out.side;
    out.K[c] = devices(rng);
  }
  for (std::size_t c = 0; c < n_agg; ++c) out.first[c + 1] = out.first[c] + static_cast<std::size_t>(out.K[c]);
  const std::size_t total = out.first[n_agg];
  out.dx.assign(total, 0.0);
  out.dy.assign(total, 0.0);
  out.g.assign(total, 0.0);
  out.channel.assign(total, -1);
  out.mark.assign(total, 0.0);
  out.h.assign(static_cast<std::size_t>(out.K[0]), 0.0);

  for (long d = 0; d < out.K[0]; ++d) {
    disc_point(params.R_a, rng, out.dx[d], out.dy[d]);
    out.h[d] = unit_exponential(rng);
  }

  std::vector<int> perm(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) perm[n] = n;
  for (std::size_t c = 1; c < n_agg; ++c) {
    const long K = out.K[c];
    if (K == 0) continue;
    const long placed = std::min<long>(K, static_cast<long>(N) * L);
    partial_shuffle(perm, static_cast<int>(std::min<long>(K, N)), rng);
    // Devices are exchangeable, so device d plays CRS rank d + 1 and RRS round d / N.
    const long shared = L == 2 ? std::min<long>(std::max<long>(K - N, 0), N) : 0;
    for (long d = 0; d < placed; ++d) {
      const std::size_t idx = out.first[c] + static_cast<std::size_t>(d);
      const int slot = static_cast<int>(d % N);
      disc_point(params.R_a, rng, out.dx[idx], out.dy[idx]);
      out.g[idx] = unit_exponential(rng);
      out.channel[idx] = perm[slot];
      double m = 1.0;
      if (crs && slot < shared) {
        const auto coef = power->coefficients(slot + 1, K);
        m = d < N ? coef.a : coef.b;
      }
      out.mark[idx] = m;
    }
  }
}

void channel_interference(const Realization& r, const NetworkParams& params, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(params.N), 0.0);
  const double half_alpha = 0.5 * params.alpha;
  for (std::size_t c = 1; c < r.aggregators(); ++c) {
    const double wx = r.agg_x[c];
    const double wy = r.agg_y[c];
    for (std::size_t idx = r.first[c]; idx < r.first[c + 1]; ++idx) {
      const int ch = r.channel[idx];
      if (ch < 0) continue;
      const double x = wx + r.dx[idx];
      const double y = wy + r.dy[idx];
      const double d2 = x * x + y * y;
      const double ra2 = r.dx[idx] * r.dx[idx] + r.dy[idx] * r.dy[idx];
      out[ch] += r.g[idx] * r.mark[idx] * std::pow(ra2 / d2, half_alpha);
    }
  }
}

void evaluate_sir(const Realization& r, const Assignment& assignment, const NetworkParams& params, SimScheme scheme,
                  const std::vector<double>& interference, std::vector<SirSample>& out) {
  out.clear();
  const bool crs = is_crs(scheme);
  const double half_alpha = 0.5 * params.alpha;
  auto tx_power = [&](int d) {
    const double ra2 = r.dx[d] * r.dx[d] + r.dy[d] * r.dy[d];
    return assignment.weight[d] * params.rho * std::pow(ra2, half_alpha);
  };
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : std::numeric_limits<double>::infinity(); };
  for (std::size_t n = 0; n < assignment.channels.size(); ++n) {
    const auto& devs = assignment.channels[n];
    const double I = interference[n];
    if (devs.empty()) continue;
    if (devs.size() == 1) {
      const int d = devs[0];
      SirSample s;
      s.device = d;
      s.channel = static_cast<int>(n);
      s.j = 1;
      s.u = 1;
      s.rank = assignment.rank[d];
      s.sir = ratio(assignment.weight[d] * r.h[d], I);
      s.success = s.sir >= params.theta;
      s.power = tx_power(d);
      out.push_back(s);
      continue;
    }
    if (devs.size() != 2) throw domain_error("evaluate_sir: SIR after SIC is modelled for at most two devices");
    int first = devs[0];
    int second = devs[1];
    // RRS decodes the stronger instantaneous gain first; CRS lists are already in decode order.
    if (!crs && (r.h[second] > r.h[first] || (r.h[second] == r.h[first] && second < first))) std::swap(first, second);
    const double s1 = assignment.weight[first] * r.h[first];
    const double s2 = assignment.weight[second] * r.h[second];
    SirSample a;
    a.device = first;
    a.channel = static_cast<int>(n);
    a.j = 1;
    a.u = 2;
    a.rank = assignment.rank[first];
    a.sir = ratio(s1, I + s2);
    a.success = a.sir >= params.theta;
    a.power = tx_power(first);
    SirSample b = a;
    b.device = second;
    b.j = 2;
    b.rank = assignment.rank[second];
    b.sir = ratio(s2, I + params.mu * s1);
    b.success = b.sir >= params.theta;
    b.power = tx_power(second);
    out.push_back(a);
    out.push_back(b);
  }
}

namespace {

struct MeanAcc {
  long n = 0;
  double s = 0.0;
  double s2 = 0.0;
  void add(double x) {
    ++n;
    s += x;
    s2 += x * x;
  }
  void merge(const MeanAcc& o) {
    n += o.n;
    s += o.s;
    s2 += o.s2;
  }
  Estimate estimate() const {
    Estimate e;
    e.samples = n;
    if (n == 0) {
      e.value = e.ci_low = e.ci_high = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    e.value = s / n;
    const double var = n > 1 ? std::max(0.0, (s2 - s * s / n) / (n - 1)) : 0.0;
    e.std_error = std::sqrt(var / n);
    e.ci_low = e.value - 1.96 * e.std_error;
    e.ci_high = e.value + 1.96 * e.std_error;
    return e;
  }
};

// Ratio sum(y) / sum(x) with a delta-method standard error.
struct RatioAcc {
  long n = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  void add(double x, double y) {
    ++n;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  void merge(const RatioAcc& o) {
    n += o.n;
    sx += o.sx;
    sy += o.sy;
    sxx += o.sxx;
    syy += o.syy;
    sxy += o.sxy;
  }
  Estimate estimate() const {
    Estimate e;
    e.samples = n;
    if (n == 0 || sx == 0.0) {
      e.value = e.ci_low = e.ci_high = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    const double R = sy / sx;
    const double xbar = sx / n;
    const double resid = std::max(0.0, syy - 2.0 * R * sxy + R * R * sxx);
    e.value = R;
    e.std_error = n > 1 ? std::sqrt(resid / (static_cast<double>(n) * (n - 1))) / xbar : 0.0;
    e.ci_low = R - 1.96 * e.std_error;
    e.ci_high = R + 1.96 * e.std_error;
    return e;
  }
};

struct CountAcc {
  long trials = 0;
  long successes = 0;
  void merge(const CountAcc& o) {
    trials += o.trials;
    successes += o.successes;
  }
  Estimate estimate() const {
    Estimate e;
    e.samples = trials;
    if (trials == 0) {
      e.value = e.ci_low = e.ci_high = std::numeric_limits<double>::quiet_NaN();
      return e;
    }
    e.value = static_cast<double>(successes) / trials;
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / trials);
    e.ci_low = e.value - 1.96 * e.std_error;
    e.ci_high = e.value + 1.96 * e.std_error;
    return e;
  }
};

struct Tally {
  std::array<MeanAcc, 3> cls;  // (1,1), (1,2), (2,2)
  RatioAcc channel_pooled;
  MeanAcc run_mean;
  MeanAcc served;
  MeanAcc power;
  std::vector<MeanAcc> occupancy;
  MeanAcc aggregators;
  std::vector<std::array<CountAcc, 3>> per_rank;
  long nonfinite = 0;

  void merge(const Tally& o) {
    for (int k = 0; k < 3; ++k) cls[k].merge(o.cls[k]);
    channel_pooled.merge(o.channel_pooled);
    run_mean.merge(o.run_mean);
    served.merge(o.served);
    power.merge(o.power);
    for (std::size_t u = 0; u < occupancy.size(); ++u) occupancy[u].merge(o.occupancy[u]);
    aggregators.merge(o.aggregators);
    for (std::size_t i = 0; i < per_rank.size(); ++i) {
      for (int k = 0; k < 3; ++k) per_rank[i][k].merge(o.per_rank[i][k]);
    }
    nonfinite += o.nonfinite;
  }
};

int class_index(int j, int u) { return u == 1 ? 0 : (j == 1 ? 1 : 2); }

template <class Work>
void run_chunks(long runs, int threads, long chunk, Work&& work) {
  const long chunks = (runs + chunk - 1) / chunk;
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<long>(workers, chunks));
  std::atomic<long> next{0};
  auto loop = [&] {
    for (long c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      work(c, c * chunk, std::min(runs, (c + 1) * chunk));
    }
  };
  if (workers <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

constexpr long kChunk = 512;

Rng run_rng(std::uint64_t seed, long run) {
  return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(run) + 0x632be59bd9b4e019ULL)));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::optional<PowerControl> make_power_control(const NetworkParams& params, SimScheme scheme, double fixed_a_fraction) {
  if (scheme == SimScheme::crs_fixed) return PowerControl::fixed(params.N, params.delta, fixed_a_fraction);
  if (scheme == SimScheme::crs_theorem4) {
    const long cap = std::max<long>(kmax_for_tail(params.m_bar, 1e-12) + 10, 2L * params.N);
    return PowerControl::theorem4(params.N, params.theta, params.mu, params.delta, cap);
  }
  return std::nullopt;
}

MetricReport estimate_metrics(const NetworkParams& params, const SimConfig& config) {
  params.validate();
  config.validate(params);
  const int N = params.N;
  const int L = effective_L(params, config.scheme);
  const bool crs = is_crs(config.scheme);

  const std::optional<PowerControl> power = make_power_control(params, config.scheme, config.fixed_a_fraction);
  NetworkParams run_params = params;
  run_params.L = L;

  const long chunks = (config.runs + kChunk - 1) / kChunk;
  Tally blank;
  blank.occupancy.resize(static_cast<std::size_t>(L) + 1);
  if (config.record_per_rank) blank.per_rank.resize(static_cast<std::size_t>(N));
  std::vector<Tally> partial(static_cast<std::size_t>(chunks), blank);

  run_chunks(config.runs, config.threads, kChunk, [&](long c, long begin, long end) {
    Tally& t = partial[static_cast<std::size_t>(c)];
    Realization real;
    std::vector<double> interference;
    std::vector<SirSample> samples;
    for (long run = begin; run < end; ++run) {
      Rng rng = run_rng(config.seed, run);
      sample_realization(run_params, config, power ? &*power : nullptr, rng, real);
      const long K0 = real.K[0];
      Assignment a = crs ? crs_assign(real.h, N, L, power ? &*power : nullptr) : rrs_assign(K0, N, L, rng);
      channel_interference(real, run_params, interference);
      for (double v : interference) {
        if (!std::isfinite(v) || v < 0.0) ++t.nonfinite;
      }
      evaluate_sir(real, a, run_params, config.scheme, interference, samples);

      std::array<int, 3> trials{};
      std::array<int, 3> wins{};
      double successes = 0.0;
      double power_sum = 0.0;
      for (const auto& s : samples) {
        const int k = class_index(s.j, s.u);
        ++trials[k];
        if (s.success) {
          ++wins[k];
          successes += 1.0;
        }
        power_sum += s.power;
        if (config.record_per_rank && s.rank >= 1) {
          auto& acc = t.per_rank[static_cast<std::size_t>(s.rank - 1)][k];
          ++acc.trials;
          if (s.success) ++acc.successes;
        }
      }
      for (int k = 0; k < 3; ++k) {
        if (trials[k] > 0) t.cls[k].add(static_cast<double>(wins[k]) / trials[k]);
      }
      // Channel-pooled success: mean over occupied channels of each channel's success fraction.
      std::vector<int> per_channel(static_cast<std::size_t>(N), 0);
      std::vector<int> per_channel_win(static_cast<std::size_t>(N), 0);
      for (const auto& s : samples) {
        ++per_channel[s.channel];
        if (s.success) ++per_channel_win[s.channel];
      }
      double occupied = 0.0;
      double frac_sum = 0.0;
      std::vector<int> hist(static_cast<std::size_t>(L) + 1, 0);
      for (int n = 0; n < N; ++n) {
        hist[std::min(per_channel[n], L)] += 1;
        if (per_channel[n] == 0) continue;
        occupied += 1.0;
        frac_sum += static_cast<double>(per_channel_win[n]) / per_channel[n];
      }
      t.channel_pooled.add(occupied, frac_sum);
      if (!samples.empty()) t.run_mean.add(successes / static_cast<double>(samples.size()));
      t.served.add(successes);
      t.power.add(power_sum / N);
      for (int u = 0; u <= L; ++u) t.occupancy[u].add(static_cast<double>(hist[u]) / N);
      t.aggregators.add(static_cast<double>(real.aggregators() - 1));
    }
  });

  Tally total = blank;
  for (const auto& t : partial) total.merge(t);

  MetricReport rep;
  rep.scheme = config.scheme;
  rep.runs = config.runs;
  rep.seed = config.seed;
  rep.L = L;
  rep.delta = crs ? params.delta : (L == 2 ? 2.0 : 1.0);
  rep.p11 = total.cls[0].estimate();
  rep.p12 = total.cls[1].estimate();
  rep.p22 = total.cls[2].estimate();
  rep.overall = crs ? total.run_mean.estimate() : total.channel_pooled.estimate();
  rep.avg_served = total.served.estimate();
  rep.power_per_channel = total.power.estimate();
  for (const auto& o : total.occupancy) rep.occupancy.push_back(o.estimate());
  rep.aggregators = total.aggregators.estimate();
  for (const auto& r : total.per_rank) rep.per_rank.push_back({r[0].estimate(), r[1].estimate(), r[2].estimate()});
  rep.nonfinite_interference = total.nonfinite;
  return rep;
}

std::vector<Estimate> estimate_laplace(const NetworkParams& params, const OccupancyPMF& pmf, MarkMode marks,
                                       double fixed_a, const std::vector<double>& s_grid, long runs,
                                       std::uint64_t seed, double expected_aggregators) {
  params.validate();
  if (runs < 1) throw domain_error("estimate_laplace: runs must be >= 1");
  if (marks != MarkMode::unit && pmf.L() > 2) throw domain_error("estimate_laplace: marks need L <= 2");
  if (marks == MarkMode::fixed && !(fixed_a > 0.0 && fixed_a < params.delta)) {
    throw domain_error("estimate_laplace: fixed mark must satisfy 0 < a < delta");
  }
  SimConfig cfg;
  cfg.expected_aggregators = expected_aggregators;
  cfg.runs = runs;
  cfg.validate(params);
  const double area = window_area(params, cfg);
  const double side = std::sqrt(area);
  std::discrete_distribution<int> occupancy(pmf.c.begin(), pmf.c.end());
  const long chunks = (runs + kChunk - 1) / kChunk;
  std::vector<std::vector<MeanAcc>> partial(static_cast<std::size_t>(chunks), std::vector<MeanAcc>(s_grid.size()));
  const double half_alpha = 0.5 * params.alpha;

  run_chunks(runs, 0, kChunk, [&](long c, long begin, long end) {
    auto& acc = partial[static_cast<std::size_t>(c)];
    auto occ = occupancy;
    PoissonSampler clusters(params.lambda_a * area);
    for (long run = begin; run < end; ++run) {
      Rng rng = run_rng(seed, run);
      const long n = clusters(rng);
      double I = 0.0;
      for (long k = 0; k < n; ++k) {
        const double wx = (uniform01(rng) - 0.5) * side;
        const double wy = (uniform01(rng) - 0.5) * side;
        const int u = occ(rng);
        double a = 1.0;
        double b = 1.0;
        if (u == 2 && marks == MarkMode::fixed) {
          a = fixed_a;
          b = params.delta - fixed_a;
        } else if (u == 2 && marks == MarkMode::uniform) {
          a = uniform01(rng) * params.delta;
          b = params.delta - a;
        }
        for (int d = 0; d < u; ++d) {
          double ox = 0.0;
          double oy = 0.0;
          disc_point(params.R_a, rng, ox, oy);
          const double x = wx + ox;
          const double y = wy + oy;
          const double m = d == 0 ? a : b;
          I += unit_exponential(rng) * m * std::pow((ox * ox + oy * oy) / (x * x + y * y), half_alpha);
        }
      }
      for (std::size_t q = 0; q < s_grid.size(); ++q) acc[q].add(std::exp(-s_grid[q] * I));
    }
  });

  std::vector<MeanAcc> total(s_grid.size());
  for (const auto& p : partial) {
    for (std::size_t q = 0; q < total.size(); ++q) total[q].merge(p[q]);
  }
  std::vector<Estimate> out;
  for (const auto& t : total) out.push_back(t.estimate());
  return out;
}

}  // namespace aggsched
