#include "aggsched/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "aggsched/success.hpp"

namespace aggsched {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

// Leading sweep column, if any.
std::vector<std::string> with_sweep(const Scenario& s, std::vector<std::string> cols) {
  if (s.sweep) cols.insert(cols.begin(), s.sweep->parameter);
  return cols;
}

void push_row(Table& t, const Scenario& s, double x, std::vector<Cell> row) {
  if (s.sweep) row.insert(row.begin(), x);
  t.rows.push_back(std::move(row));
}

std::string scenario_comment(const Scenario& s) {
  std::string c = describe(s);
  if (s.sweep) {
    c += " sweep=" + s.sweep->parameter + ":";
    for (std::size_t k = 0; k < s.sweep->values.size(); ++k) {
      c += (k ? "," : "") + format_number(s.sweep->values[k]);
    }
  }
  return c;
}

Table make_table(const std::string& name, const Scenario& s, std::vector<std::string> cols) {
  Table t;
  t.name = name;
  t.comment = scenario_comment(s);
  t.columns = with_sweep(s, std::move(cols));
  return t;
}

// Per-point work computed concurrently, rows appended in sweep order.
template <class F>
void fill_rows(Table& t, const Scenario& s, F&& rows_for) {
  const auto points = expand(s);
  std::vector<std::vector<std::vector<Cell>>> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = rows_for(points[i].scenario); });
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (auto& r : out[i]) push_row(t, s, points[i].x, std::move(r));
  }
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  const std::size_t threads = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& out, const Table& t) {
  if (!t.comment.empty()) out << "# " << t.comment << '\n';
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << csv_field(t.columns[k]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(cell_text(row[k]));
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& t) {
  nlohmann::ordered_json j;
  j["name"] = t.name;
  j["parameters"] = t.comment;
  j["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (std::size_t k = 0; k < row.size() && k < t.columns.size(); ++k) {
      const Cell& c = row[k];
      if (const auto* d = std::get_if<double>(&c)) {
        // Round-trip through the CSV formatting so both outputs carry the same digits.
        r[t.columns[k]] = std::isfinite(*d) ? nlohmann::ordered_json(std::stod(format_number(*d)))
                                            : nlohmann::ordered_json(nullptr);
      } else if (const auto* i = std::get_if<long long>(&c)) {
        r[t.columns[k]] = *i;
      } else {
        r[t.columns[k]] = std::get<std::string>(c);
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

std::string write_table(const Table& t, const std::string& dir, const std::string& format) {
  if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (t.name + "." + format)).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (format == "csv") {
    write_csv(out, t);
  } else {
    write_json(out, t);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
  return path;
}

AnalyticReport analytic_metrics(const NetworkParams& params, SimScheme scheme, double fixed_a_fraction,
                                LaplaceVariant rrs_variant, double tau) {
  AnalyticReport r;
  r.scheme = scheme;
  if (!is_crs(scheme)) {
    NetworkParams q = params;
    if (scheme == SimScheme::oma) q.L = 1;
    const RrsAnalysis a = analyze_rrs(q, rrs_variant);
    r.L = q.L;
    r.delta = q.L == 2 ? 2.0 : 1.0;
    r.pmf = a.pmf;
    r.p11 = a.p11;
    r.p11r = kNaN;
    r.p12 = q.L == 2 ? a.p12 : kNaN;
    r.p22 = q.L == 2 ? a.p22 : kNaN;
    r.overall = a.overall;
    r.avg_served = a.avg_served;
    q.delta = r.delta;
    r.power_per_channel = avg_power(q, a.pmf, q.L == 1 ? PowerScheme::oma : PowerScheme::hybrid);
    return r;
  }
  const auto power = make_power_control(params, scheme, fixed_a_fraction);
  const CrsAnalysis a = analyze_crs(params, *power, tau);
  r.L = params.L;
  r.delta = params.delta;
  r.pmf = a.pmf;
  r.p11 = a.p11c;
  r.p11r = a.p11r;
  r.p12 = a.p12c;
  r.p22 = a.p22c;
  r.overall = a.overall;
  r.avg_served = a.avg_served;
  r.power_per_channel = avg_power(params, a.pmf, params.L == 1 ? PowerScheme::oma : PowerScheme::hybrid);
  r.kmax = a.kmax;
  r.clamped = a.clamped;
  return r;
}

AnalyticReport analytic_metrics(const Scenario& s) {
  return analytic_metrics(s.network, s.sim.scheme, s.sim.fixed_a_fraction, s.analysis.rrs_variant, s.analysis.tau);
}

Table pmf_table(const Scenario& s) {
  Table t = make_table("pmf", s, {"u", "c_u"});
  fill_rows(t, s, [](const Scenario& p) {
    std::vector<std::vector<Cell>> rows;
    const OccupancyPMF pmf = occupancy_pmf(p.network);
    // m_bar = 0 leaves only the empty-channel row.
    const int top = p.network.m_bar == 0.0 ? 0 : pmf.L();
    for (int u = 0; u <= top; ++u) rows.push_back({static_cast<long long>(u), pmf.at(u)});
    return rows;
  });
  return t;
}

Table laplace_table(const Scenario& s) {
  Table t = make_table("laplace", s, {"s_db", "s", "exact", "upper", "lower", "weighted", "crs_weighted"});
  fill_rows(t, s, [](const Scenario& p) {
    std::vector<std::vector<Cell>> rows;
    const OccupancyPMF pmf = occupancy_pmf(p.network);
    const auto exact = LaplaceModel::make(LaplaceVariant::rrs_exact, p.network, pmf);
    const auto upper = LaplaceModel::make(LaplaceVariant::rrs_upper, p.network, pmf);
    const auto lower = LaplaceModel::make(LaplaceVariant::rrs_lower, p.network, pmf);
    const auto weighted = LaplaceModel::make(LaplaceVariant::rrs_weighted, p.network, pmf);
    const auto crs = LaplaceModel::make(LaplaceVariant::crs_weighted, p.network, pmf);
    for (double db : p.analysis.s_db) {
      const double x = db_to_linear(db);
      rows.push_back({db, x, laplace_rrs(exact, x), laplace_rrs(upper, x), laplace_rrs(lower, x),
                      laplace_rrs(weighted, x), laplace_crs(crs, x, p.network.delta)});
    }
    return rows;
  });
  return t;
}

Table success_table(const Scenario& s, long K) {
  const bool ranks = K > 0 && is_crs(s.sim.scheme);
  Table t = ranks ? make_table("success_ranks", s, {"scheme", "K", "i", "j", "u", "a", "b", "success"})
                  : make_table("success", s, {"scheme", "j", "u", "success"});
  fill_rows(t, s, [&](const Scenario& p) {
    std::vector<std::vector<Cell>> rows;
    const std::string name = to_string(p.sim.scheme);
    if (!ranks) {
      const AnalyticReport r = analytic_metrics(p);
      rows.push_back({name, 1LL, 1LL, r.p11});
      if (r.L == 2) {
        rows.push_back({name, 1LL, 2LL, r.p12});
        rows.push_back({name, 2LL, 2LL, r.p22});
      }
      return rows;
    }
    const NetworkParams& q = p.network;
    const auto power = make_power_control(q, p.sim.scheme, p.sim.fixed_a_fraction);
    const auto model = LaplaceModel::make(LaplaceVariant::crs_weighted, q);
    const long served_ranks = std::min<long>(K, q.N);
    const long pairs = q.L == 2 ? std::clamp<long>(K - q.N, 0, q.N) : 0;
    for (long i = 1; i <= served_ranks; ++i) {
      const int ii = static_cast<int>(i);
      if (i <= pairs) {
        const PowerCoefficients c = power->coefficients(ii, K);
        rows.push_back({name, static_cast<long long>(K), static_cast<long long>(i), 1LL, 2LL, c.a, c.b,
                        crs_rank_success(1, 2, ii, K, q, *power, model)});
        rows.push_back({name, static_cast<long long>(K), static_cast<long long>(i), 2LL, 2LL, c.a, c.b,
                        crs_rank_success(2, 2, ii, K, q, *power, model)});
      } else {
        rows.push_back({name, static_cast<long long>(K), static_cast<long long>(i), 1LL, 1LL, 1.0, kNaN,
                        crs_rank_success(1, 1, ii, K, q, *power, model)});
      }
    }
    return rows;
  });
  return t;
}

Table metrics_table(const Scenario& s) {
  Table t = make_table("metrics", s,
                       {"scheme", "L", "delta", "c0", "c1", "c2", "p11", "p12", "p22", "p11r", "overall", "avg_served",
                        "power_per_channel", "kmax", "clamped"});
  fill_rows(t, s, [](const Scenario& p) {
    const AnalyticReport r = analytic_metrics(p);
    std::vector<std::vector<Cell>> rows;
    rows.push_back({std::string(to_string(r.scheme)), static_cast<long long>(r.L), r.delta, r.pmf.at(0), r.pmf.at(1),
                    r.pmf.at(2), r.p11, r.p12, r.p22, r.p11r, r.overall, r.avg_served, r.power_per_channel,
                    static_cast<long long>(r.kmax), static_cast<long long>(r.clamped)});
    return rows;
  });
  return t;
}

Table delta_star_table(const Scenario& s) {
  Table t = make_table("delta_star", s, {"alpha", "s", "c2", "lower_bracket", "delta_star", "residual", "degenerate"});
  fill_rows(t, s, [](const Scenario& p) {
    const NetworkParams& q = p.network;
    const double c2 = occupancy_pmf(q).at(2);
    const DeltaStar d = delta_star(q, q.theta, c2);
    std::vector<std::vector<Cell>> rows;
    rows.push_back({q.alpha, q.theta, c2, std::pow(2.0, (2.0 - q.alpha) / 2.0), d.delta, d.residual,
                    static_cast<long long>(d.degenerate ? 1 : 0)});
    return rows;
  });
  return t;
}

std::vector<Table> simulate_tables(const Scenario& s) {
  const std::vector<std::string> metrics = {"p11", "p12", "p22", "overall", "avg_served", "power_per_channel",
                                            "c0", "c1", "c2"};
  std::vector<std::string> cols = {"scheme", "seed", "runs", "L", "delta"};
  for (const auto& m : metrics) {
    for (const char* suffix : {"", "_se", "_ci_low", "_ci_high"}) cols.push_back(m + suffix);
  }
  cols.push_back("aggregators");
  cols.push_back("nonfinite_interference");
  Table t = make_table("simulate", s, cols);
  Table ranks = make_table("simulate_per_rank", s,
                           {"scheme", "seed", "rank", "j", "u", "success", "ci_low", "ci_high", "samples"});
  // The simulator already uses every core, so sweep points run in order.
  for (const auto& point : expand(s)) {
    const Scenario& p = point.scenario;
    const MetricReport r = estimate_metrics(p.network, p.sim);
    const std::string name = to_string(r.scheme);
    std::vector<Cell> row = {name, static_cast<long long>(r.seed), static_cast<long long>(r.runs),
                             static_cast<long long>(r.L), r.delta};
    auto add = [&](const Estimate& e) {
      row.insert(row.end(), {e.value, e.std_error, e.ci_low, e.ci_high});
    };
    add(r.p11);
    add(r.p12);
    add(r.p22);
    add(r.overall);
    add(r.avg_served);
    add(r.power_per_channel);
    for (int u = 0; u <= 2; ++u) {
      add(u < static_cast<int>(r.occupancy.size()) ? r.occupancy[u] : Estimate{0.0, 0.0, 0.0, 0.0, r.runs});
    }
    row.push_back(r.aggregators.value);
    row.push_back(static_cast<long long>(r.nonfinite_interference));
    push_row(t, s, point.x, std::move(row));
    static const int ju[3][2] = {{1, 1}, {1, 2}, {2, 2}};
    for (std::size_t i = 0; i < r.per_rank.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        const Estimate& e = r.per_rank[i][k];
        if (e.samples == 0) continue;
        push_row(ranks, s, point.x,
                 {name, static_cast<long long>(r.seed), static_cast<long long>(i + 1),
                  static_cast<long long>(ju[k][0]), static_cast<long long>(ju[k][1]), e.value, e.ci_low, e.ci_high,
                  static_cast<long long>(e.samples)});
      }
    }
  }
  std::vector<Table> out{t};
  if (s.sim.record_per_rank) out.push_back(ranks);
  return out;
}

// ---------------------------------------------------------------------------
// Figures

namespace {

struct CurvePoint {
  double x = 0.0;
  double analytic = kNaN;
  double simulated = kNaN;
  double ci_low = kNaN;
  double ci_high = kNaN;
};

Table curve_table(const std::string& name, const std::string& comment, const std::vector<CurvePoint>& pts) {
  Table t;
  t.name = name;
  t.comment = comment;
  t.columns = {"x", "analytic", "simulated", "ci_low", "ci_high"};
  for (const auto& p : pts) t.rows.push_back({p.x, p.analytic, p.simulated, p.ci_low, p.ci_high});
  return t;
}

void set_sim(CurvePoint& p, const Estimate& e) {
  p.simulated = e.value;
  p.ci_low = e.ci_low;
  p.ci_high = e.ci_high;
}

std::string alpha_tag(double alpha) {
  std::string s = format_number(alpha);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

std::vector<double> grid(double start, double step, double stop) {
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

std::vector<double> s_grid_linear(const Scenario& s) {
  std::vector<double> out;
  for (double db : s.analysis.s_db) out.push_back(db_to_linear(db));
  return out;
}

// Figure 2: RRS transform with c2 = 1 against s (a), and against N (b).
std::vector<Table> figure2(const Scenario& base, const FigureOptions& opt) {
  std::vector<Table> out;
  const OccupancyPMF pair = OccupancyPMF::from_probabilities({0.0, 0.0, 1.0});
  const std::vector<LaplaceVariant> variants = {LaplaceVariant::rrs_exact, LaplaceVariant::rrs_upper,
                                                LaplaceVariant::rrs_lower, LaplaceVariant::rrs_weighted};
  const std::vector<std::string> names = {"exact", "upper", "lower", "approx"};
  for (double alpha : {3.0, 5.0}) {
    Scenario sc = base;
    sc.network.alpha = alpha;
    resolve(sc);
    const auto s_grid = s_grid_linear(sc);
    std::vector<Estimate> sim;
    if (opt.runs > 0) {
      sim = estimate_laplace(sc.network, pair, MarkMode::unit, 0.5, s_grid, opt.runs, opt.seed,
                             sc.sim.expected_aggregators);
    }
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const auto model = LaplaceModel::make(variants[v], sc.network, pair);
      std::vector<CurvePoint> pts(s_grid.size());
      parallel_for(s_grid.size(), [&](std::size_t q) {
        pts[q].x = sc.analysis.s_db[q];
        pts[q].analytic = laplace_rrs(model, s_grid[q]);
        if (!sim.empty()) set_sim(pts[q], sim[q]);
      });
      out.push_back(curve_table("fig2a_alpha" + alpha_tag(alpha) + "_" + names[v],
                                describe(sc) + " c=0,0,1 x=s_db", pts));
    }
  }
  for (double log_lambda : {-4.2, -4.8}) {
    const auto Ns = grid(5, 5, 60);
    std::vector<std::vector<CurvePoint>> curves(variants.size(), std::vector<CurvePoint>(Ns.size()));
    Scenario sc = base;
    sc.network.lambda_a = std::pow(10.0, log_lambda);
    sc.network.alpha = 3.6;
    sc.network.m_bar = 60.0;
    sc.network.L = 2;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      Scenario p = sc;
      p.network.N = static_cast<int>(Ns[k]);
      resolve(p);
      const OccupancyPMF pmf = occupancy_pmf(p.network);
      Estimate sim;
      if (opt.runs > 0) {
        sim = estimate_laplace(p.network, pmf, MarkMode::unit, 0.5, {1.0}, opt.runs, opt.seed,
                               p.sim.expected_aggregators)[0];
      }
      parallel_for(variants.size(), [&](std::size_t v) {
        CurvePoint& c = curves[v][k];
        c.x = Ns[k];
        c.analytic = laplace_rrs(LaplaceModel::make(variants[v], p.network, pmf), 1.0);
        if (opt.runs > 0) set_sim(c, sim);
      });
    }
    const std::string tag = log_lambda == -4.2 ? "lambda4p2" : "lambda4p8";
    for (std::size_t v = 0; v < variants.size(); ++v) {
      out.push_back(curve_table("fig2b_" + tag + "_" + names[v], describe(sc) + " s=1 x=N", curves[v]));
    }
  }
  return out;
}

// Figure 3: CRS transform (weighted form and two fixed-mark references) with delta = 1.
std::vector<Table> figure3(const Scenario& base, const FigureOptions& opt) {
  std::vector<Table> out;
  const OccupancyPMF pair = OccupancyPMF::from_probabilities({0.0, 0.0, 1.0});
  const double delta = 1.0;
  const std::vector<double> fixed_marks = {0.5, 0.1};
  auto analytic_models = [&](const NetworkParams& q, const OccupancyPMF& pmf) {
    std::vector<LaplaceModel> m;
    m.push_back(LaplaceModel::make(LaplaceVariant::crs_weighted, q, pmf));
    for (double a : fixed_marks) {
      LaplaceModel e = LaplaceModel::make(LaplaceVariant::crs_exact_fixed_marks, q, pmf);
      e.fixed_a = a;
      e.reference = true;
      m.push_back(e);
    }
    return m;
  };
  const std::vector<std::string> names = {"approx", "exact_a0p5", "exact_a0p1"};
  for (double alpha : {3.0, 5.0}) {
    Scenario sc = base;
    sc.network.alpha = alpha;
    sc.network.delta = delta;
    sc.delta_is_star = false;
    resolve(sc);
    const auto s_grid = s_grid_linear(sc);
    std::vector<Estimate> sim;
    if (opt.runs > 0) {
      sim = estimate_laplace(sc.network, pair, MarkMode::uniform, 0.5, s_grid, opt.runs, opt.seed,
                             sc.sim.expected_aggregators);
    }
    const auto models = analytic_models(sc.network, pair);
    for (std::size_t v = 0; v < models.size(); ++v) {
      std::vector<CurvePoint> pts(s_grid.size());
      parallel_for(s_grid.size(), [&](std::size_t q) {
        pts[q].x = sc.analysis.s_db[q];
        pts[q].analytic = laplace_crs(models[v], s_grid[q], delta);
        if (!sim.empty()) set_sim(pts[q], sim[q]);
      });
      out.push_back(curve_table("fig3a_alpha" + alpha_tag(alpha) + "_" + names[v],
                                describe(sc) + " c=0,0,1 x=s_db", pts));
    }
  }
  for (double log_lambda : {-4.2, -4.8}) {
    const auto Ns = grid(5, 5, 60);
    std::vector<std::vector<CurvePoint>> curves(names.size(), std::vector<CurvePoint>(Ns.size()));
    Scenario sc = base;
    sc.network.lambda_a = std::pow(10.0, log_lambda);
    sc.network.alpha = 3.6;
    sc.network.m_bar = 60.0;
    sc.network.L = 2;
    sc.network.delta = delta;
    sc.delta_is_star = false;
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      Scenario p = sc;
      p.network.N = static_cast<int>(Ns[k]);
      resolve(p);
      const OccupancyPMF pmf = occupancy_pmf(p.network);
      Estimate sim;
      if (opt.runs > 0) {
        sim = estimate_laplace(p.network, pmf, MarkMode::uniform, 0.5, {1.0}, opt.runs, opt.seed,
                               p.sim.expected_aggregators)[0];
      }
      const auto models = analytic_models(p.network, pmf);
      parallel_for(models.size(), [&](std::size_t v) {
        CurvePoint& c = curves[v][k];
        c.x = Ns[k];
        c.analytic = laplace_crs(models[v], 1.0, delta);
        if (opt.runs > 0) set_sim(c, sim);
      });
    }
    const std::string tag = log_lambda == -4.2 ? "lambda4p2" : "lambda4p8";
    for (std::size_t v = 0; v < names.size(); ++v) {
      out.push_back(curve_table("fig3b_" + tag + "_" + names[v], describe(sc) + " s=1 x=N", curves[v]));
    }
  }
  return out;
}

// Figure 4: mean transmit power per channel against c2 with c0 = 0.
std::vector<Table> figure4(const Scenario& base, const FigureOptions&) {
  Scenario sc = base;
  resolve(sc);
  const NetworkParams& q = sc.network;
  const double psi = mean_inversion_power(q);
  const auto c2s = grid(0.0, 0.05, 1.0);
  std::vector<CurvePoint> oma, rrs, crs1, crs_star;
  std::vector<CurvePoint> star_value;
  for (double c2 : c2s) {
    const double c1 = 1.0 - c2;
    const double ds = delta_star(q, q.theta, c2).delta;
    oma.push_back({c2, (c1 + c2) * psi});
    rrs.push_back({c2, (c1 + 2.0 * c2) * psi});
    crs1.push_back({c2, (c1 + c2) * psi});
    crs_star.push_back({c2, (c1 + ds * c2) * psi});
    star_value.push_back({c2, ds});
  }
  const std::string c = describe(sc) + " c0=0 x=c2";
  return {curve_table("fig4_oma", c, oma), curve_table("fig4_rrs", c, rrs), curve_table("fig4_crs_delta1", c, crs1),
          curve_table("fig4_crs_delta_star", c, crs_star), curve_table("fig4_delta_star", c, star_value)};
}

// One scheme configuration of the sweep figures.
struct SchemeCurve {
  std::string name;
  SimScheme scheme;
  int L;
};

// Evaluates every (curve, x) pair: analytics concurrently, simulations in order.
struct SweepResult {
  std::vector<AnalyticReport> analytic;
  std::vector<MetricReport> simulated;
};

std::vector<SweepResult> run_sweep(const std::vector<SchemeCurve>& curves, const std::vector<Scenario>& points,
                                   const FigureOptions& opt) {
  std::vector<SweepResult> out(curves.size());
  for (auto& r : out) {
    r.analytic.resize(points.size());
    if (opt.runs > 0) r.simulated.resize(points.size());
  }
  std::vector<Scenario> resolved;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      Scenario p = points[k];
      p.sim.scheme = curves[c].scheme;
      p.network.L = curves[c].L;
      // RRS sharers transmit at full power; CRS pairs default to the interference-neutral budget.
      if (is_crs(curves[c].scheme) && !p.delta_given) p.delta_is_star = true;
      resolve(p);
      resolved.push_back(std::move(p));
    }
  }
  parallel_for(resolved.size(), [&](std::size_t idx) {
    out[idx / points.size()].analytic[idx % points.size()] = analytic_metrics(resolved[idx]);
  });
  if (opt.runs > 0) {
    for (std::size_t idx = 0; idx < resolved.size(); ++idx) {
      SimConfig cfg = resolved[idx].sim;
      cfg.runs = opt.runs;
      cfg.seed = opt.seed;
      out[idx / points.size()].simulated[idx % points.size()] = estimate_metrics(resolved[idx].network, cfg);
    }
  }
  return out;
}

std::vector<SchemeCurve> served_curves() {
  return {{"rrs_L1", SimScheme::rrs, 1},
          {"rrs_L2", SimScheme::rrs, 2},
          {"crs_L1", SimScheme::crs_fixed, 1},
          {"crs_fixed_L2", SimScheme::crs_fixed, 2},
          {"crs_theorem4_L2", SimScheme::crs_theorem4, 2}};
}

template <class Get>
std::vector<Table> sweep_tables(const std::string& prefix, const std::vector<SchemeCurve>& curves,
                                const std::vector<SweepResult>& res, const std::vector<double>& xs,
                                const std::string& comment, Get get) {
  std::vector<Table> out;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    std::vector<CurvePoint> pts(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
      pts[k].x = xs[k];
      const auto [analytic, sim] = get(res[c], k);
      pts[k].analytic = analytic;
      if (sim) set_sim(pts[k], *sim);
    }
    out.push_back(curve_table(prefix + curves[c].name, comment, pts));
  }
  return out;
}

std::vector<Scenario> n_points(const Scenario& base, const std::vector<double>& Ns) {
  std::vector<Scenario> pts;
  for (double n : Ns) {
    Scenario p = base;
    p.network.N = static_cast<int>(n);
    pts.push_back(p);
  }
  return pts;
}

// Figure 5: success of the two devices sharing a channel against N.
std::vector<Table> figure5(const Scenario& base, const FigureOptions& opt) {
  const auto Ns = grid(10, 5, 60);
  const std::vector<SchemeCurve> curves = {{"rrs", SimScheme::rrs, 2},
                                           {"crs_fixed", SimScheme::crs_fixed, 2},
                                           {"crs_theorem4", SimScheme::crs_theorem4, 2}};
  const auto res = run_sweep(curves, n_points(base, Ns), opt);
  const std::string comment = describe(base) + " x=N";
  auto p12 = sweep_tables("fig5_p12_", curves, res, Ns, comment, [](const SweepResult& r, std::size_t k) {
    return std::pair<double, const Estimate*>{r.analytic[k].p12, r.simulated.empty() ? nullptr : &r.simulated[k].p12};
  });
  auto p22 = sweep_tables("fig5_p22_", curves, res, Ns, comment, [](const SweepResult& r, std::size_t k) {
    return std::pair<double, const Estimate*>{r.analytic[k].p22, r.simulated.empty() ? nullptr : &r.simulated[k].p22};
  });
  p12.insert(p12.end(), p22.begin(), p22.end());
  return p12;
}

std::vector<Table> figure6(const Scenario& base, const FigureOptions& opt, bool served) {
  const auto Ns = grid(10, 5, 60);
  const auto curves = served_curves();
  const auto res = run_sweep(curves, n_points(base, Ns), opt);
  const std::string comment = describe(base) + " x=N";
  if (served) {
    return sweep_tables("fig6b_", curves, res, Ns, comment, [](const SweepResult& r, std::size_t k) {
      return std::pair<double, const Estimate*>{r.analytic[k].avg_served,
                                                r.simulated.empty() ? nullptr : &r.simulated[k].avg_served};
    });
  }
  return sweep_tables("fig6a_", curves, res, Ns, comment, [](const SweepResult& r, std::size_t k) {
    return std::pair<double, const Estimate*>{r.analytic[k].overall,
                                              r.simulated.empty() ? nullptr : &r.simulated[k].overall};
  });
}

auto served_getter() {
  return [](const SweepResult& r, std::size_t k) {
    return std::pair<double, const Estimate*>{r.analytic[k].avg_served,
                                              r.simulated.empty() ? nullptr : &r.simulated[k].avg_served};
  };
}

// Figure 7a: served devices against lambda_a for mu in {0, 0.1}, N = 30.
std::vector<Table> figure7a(const Scenario& base, const FigureOptions& opt) {
  const auto logs = grid(-5.0, 0.1, -3.5);
  std::vector<double> lambdas;
  for (double l : logs) lambdas.push_back(std::pow(10.0, l));
  std::vector<Table> out;
  for (double mu : {0.0, 0.1}) {
    std::vector<Scenario> pts;
    for (double lam : lambdas) {
      Scenario p = base;
      p.network.N = 30;
      p.network.mu = mu;
      p.network.lambda_a = lam;
      pts.push_back(p);
    }
    const auto curves = served_curves();
    const auto res = run_sweep(curves, pts, opt);
    Scenario shown = pts.front();
    const std::string tag = mu == 0.0 ? "mu0_" : "mu0p1_";
    auto t = sweep_tables("fig7a_" + tag, curves, res, lambdas, describe(shown) + " x=lambda_a_per_m2",
                          served_getter());
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

// Figure 7b: served devices against mu, N = 30.
std::vector<Table> figure7b(const Scenario& base, const FigureOptions& opt) {
  const auto mus = grid(0.0, 0.02, 0.3);
  std::vector<Scenario> pts;
  for (double mu : mus) {
    Scenario p = base;
    p.network.N = 30;
    p.network.mu = mu;
    pts.push_back(p);
  }
  const auto curves = served_curves();
  const auto res = run_sweep(curves, pts, opt);
  return sweep_tables("fig7b_", curves, res, mus, describe(pts.front()) + " x=mu", served_getter());
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"2", "3", "4", "5", "6a", "6b", "7a", "7b"};
  return ids;
}

std::vector<Table> run_figure(const std::string& id, const Scenario& base, const FigureOptions& options) {
  if (id == "2") return figure2(base, options);
  if (id == "3") return figure3(base, options);
  if (id == "4") return figure4(base, options);
  if (id == "5") return figure5(base, options);
  if (id == "6a") return figure6(base, options, false);
  if (id == "6b") return figure6(base, options, true);
  if (id == "7a") return figure7a(base, options);
  if (id == "7b") return figure7b(base, options);
  throw std::invalid_argument("unknown figure id '" + id + "' (2, 3, 4, 5, 6a, 6b, 7a, 7b)");
}

}  // namespace aggsched
