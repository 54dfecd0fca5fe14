// Command-line driver: analytic tables, simulations and figure data.
#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "aggsched/errors.hpp"
#include "aggsched/experiments.hpp"
#include "aggsched/scenario.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kNumeric = 3 };

struct Common {
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scenario", c.scenario_path, "Scenario file")->check(CLI::ExistingFile);
  app->add_option("--set", c.overrides, "Override a field, key=value or section.key=value")->take_all();
  app->add_option("--seed", c.seed, "Simulation seed");
  app->add_option("--out", c.out, "Output directory (default: stdout)");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

aggsched::Scenario build_scenario(const Common& c) {
  aggsched::Scenario s = c.scenario_path.empty() ? aggsched::default_scenario() : aggsched::load_scenario(c.scenario_path);
  for (const auto& o : c.overrides) aggsched::apply_override(s, o);
  if (c.seed) s.sim.seed = *c.seed;
  if (!c.out.empty()) s.output.path = c.out;
  if (!c.format.empty()) s.output.format = c.format;
  return s;
}

void emit(const std::vector<aggsched::Table>& tables, const aggsched::Scenario& s) {
  if (s.output.path.empty() || s.output.path == "-") {
    for (std::size_t k = 0; k < tables.size(); ++k) {
      if (k) std::cout << '\n';
      if (s.output.format == "json") {
        aggsched::write_json(std::cout, tables[k]);
      } else {
        aggsched::write_csv(std::cout, tables[k]);
      }
    }
    return;
  }
  for (const auto& t : tables) std::cerr << aggsched::write_table(t, s.output.path, s.output.format) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid OMA/NOMA aggregation network metrics: analytic evaluation and Monte Carlo"};
  app.require_subcommand(1);

  Common common;
  auto* pmf = app.add_subcommand("pmf", "Per-channel occupancy distribution");
  auto* laplace = app.add_subcommand("laplace", "Interference Laplace transforms over the s grid");
  auto* success = app.add_subcommand("success", "Conditional success probabilities");
  auto* metrics = app.add_subcommand("metrics", "Analytic metric set for the configured scheme");
  auto* dstar = app.add_subcommand("delta-star", "Interference-neutral power budget");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo metric estimates");
  auto* figure = app.add_subcommand("figure", "Figure data, one table per curve");
  for (auto* sub : {pmf, laplace, success, metrics, dstar, simulate, figure}) add_common(sub, common);

  long rank_K = 0;
  success->add_option("--K", rank_K, "CRS only: per-rank values for a cluster of K devices")
      ->check(CLI::PositiveNumber);
  std::string figure_id;
  std::optional<long> figure_runs;
  figure->add_option("id", figure_id, "Figure id: 2, 3, 4, 5, 6a, 6b, 7a, 7b")->required();
  figure->add_option("--runs", figure_runs, "Monte Carlo runs per point (0 skips simulation; default: scenario runs)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const aggsched::Scenario s = build_scenario(common);
    std::vector<aggsched::Table> tables;
    if (pmf->parsed()) {
      tables.push_back(aggsched::pmf_table(s));
    } else if (laplace->parsed()) {
      tables.push_back(aggsched::laplace_table(s));
    } else if (success->parsed()) {
      tables.push_back(aggsched::success_table(s, rank_K));
    } else if (metrics->parsed()) {
      tables.push_back(aggsched::metrics_table(s));
    } else if (dstar->parsed()) {
      tables.push_back(aggsched::delta_star_table(s));
    } else if (simulate->parsed()) {
      tables = aggsched::simulate_tables(s);
    } else if (figure->parsed()) {
      const auto& ids = aggsched::figure_ids();
      if (std::find(ids.begin(), ids.end(), figure_id) == ids.end()) {
        std::cerr << "error: unknown figure id '" << figure_id << "' (2, 3, 4, 5, 6a, 6b, 7a, 7b)\n";
        return kUsage;
      }
      aggsched::FigureOptions opt;
      opt.runs = figure_runs ? *figure_runs : s.sim.runs;
      opt.seed = s.sim.seed;
      tables = aggsched::run_figure(figure_id, s, opt);
    }
    emit(tables, s);
  } catch (const aggsched::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const aggsched::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const aggsched::accuracy_error& e) {
    std::cerr << "accuracy error: " << e.what() << " (best estimate " << e.best_estimate() << ", error "
              << e.error_estimate() << ")\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
