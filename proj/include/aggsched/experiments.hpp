#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "aggsched/montecarlo.hpp"
#include "aggsched/scenario.hpp"

namespace aggsched {

using Cell = std::variant<double, long long, std::string>;

/// A named table; NaN cells mean "not applicable".
struct Table {
  std::string name;
  std::string comment;  // resolved parameter set
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// %.12g, with nan/inf spelled out.
std::string format_number(double v);

/// "# comment" line, header row, then one row per line.
void write_csv(std::ostream& out, const Table& t);
/// {"name", "parameters", "columns", "rows": [{column: value}]}; NaN becomes null.
void write_json(std::ostream& out, const Table& t);
/// Writes <dir>/<name>.<format> and returns the path.
std::string write_table(const Table& t, const std::string& dir, const std::string& format);

/// Analytic metric set for one scheme. p11 is the sole-occupant success; under CRS it is
/// averaged over cluster sizes with sole occupants and p11r is the K <= N value.
struct AnalyticReport {
  SimScheme scheme = SimScheme::rrs;
  int L = 2;
  double delta = 1.0;
  OccupancyPMF pmf;
  double p11 = 0.0, p12 = 0.0, p22 = 0.0;
  double p11r = 0.0;
  double overall = 0.0;
  double avg_served = 0.0;
  double power_per_channel = 0.0;
  long kmax = 0;
  std::size_t clamped = 0;
};
AnalyticReport analytic_metrics(const NetworkParams& params, SimScheme scheme, double fixed_a_fraction = 0.5,
                                LaplaceVariant rrs_variant = LaplaceVariant::rrs_exact, double tau = 1e-5);
AnalyticReport analytic_metrics(const Scenario& s);

/// Subcommand tables. Each row starts with the sweep value when the scenario has a sweep.
Table pmf_table(const Scenario& s);
Table laplace_table(const Scenario& s);
/// Conditional success per (j, u). With K > 0 under a CRS scheme, per-rank values for that K.
Table success_table(const Scenario& s, long K = 0);
Table metrics_table(const Scenario& s);
Table delta_star_table(const Scenario& s);
/// Simulated metrics with standard errors and 95% intervals; per-rank rows go into a second
/// table when record_per_rank is set.
std::vector<Table> simulate_tables(const Scenario& s);

/// Figure data. runs == 0 skips simulation (simulated columns are NaN).
struct FigureOptions {
  long runs = 0;
  std::uint64_t seed = 1;
};
const std::vector<std::string>& figure_ids();
/// One table per curve with columns x, analytic, simulated, ci_low, ci_high.
/// Throws std::invalid_argument for an unknown id.
std::vector<Table> run_figure(const std::string& id, const Scenario& base, const FigureOptions& options);

/// Runs f(0) .. f(n-1) on up to hardware_concurrency threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace aggsched
