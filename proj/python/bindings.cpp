#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "aggsched/errors.hpp"
#include "aggsched/experiments.hpp"
#include "aggsched/laplace.hpp"
#include "aggsched/montecarlo.hpp"
#include "aggsched/occupancy.hpp"
#include "aggsched/scenario.hpp"
#include "aggsched/specfun.hpp"
#include "aggsched/success.hpp"

namespace py = pybind11;
using namespace aggsched;

namespace {

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["std_error"] = e.std_error;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["samples"] = e.samples;
  return d;
}

py::dict report_dict(const MetricReport& r) {
  py::dict d;
  d["scheme"] = to_string(r.scheme);
  d["runs"] = r.runs;
  d["seed"] = r.seed;
  d["L"] = r.L;
  d["delta"] = r.delta;
  d["p11"] = estimate_dict(r.p11);
  d["p12"] = estimate_dict(r.p12);
  d["p22"] = estimate_dict(r.p22);
  d["overall"] = estimate_dict(r.overall);
  d["avg_served"] = estimate_dict(r.avg_served);
  d["power_per_channel"] = estimate_dict(r.power_per_channel);
  py::list occ;
  for (const auto& e : r.occupancy) occ.append(estimate_dict(e));
  d["occupancy"] = occ;
  d["nonfinite_interference"] = r.nonfinite_interference;
  return d;
}

py::dict analytic_dict(const AnalyticReport& r) {
  py::dict d;
  d["scheme"] = to_string(r.scheme);
  d["L"] = r.L;
  d["delta"] = r.delta;
  d["c"] = r.pmf.c;
  d["p11"] = r.p11;
  d["p12"] = r.p12;
  d["p22"] = r.p22;
  d["p11r"] = r.p11r;
  d["overall"] = r.overall;
  d["avg_served"] = r.avg_served;
  d["power_per_channel"] = r.power_per_channel;
  return d;
}

std::string table_csv(const Table& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

Scenario scenario_from(const std::string& text, const std::vector<std::string>& overrides) {
  std::istringstream in(text);
  Scenario s = parse_scenario(in, "<string>");
  for (const auto& o : overrides) apply_override(s, o);
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Analytic metrics and Monte Carlo for clustered hybrid OMA/NOMA uplinks";

  py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<accuracy_error>(m, "AccuracyError", PyExc_ArithmeticError);
  py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);

  py::class_<NetworkParams>(m, "NetworkParams")
      .def(py::init<>())
      .def_readwrite("lambda_a", &NetworkParams::lambda_a)
      .def_readwrite("R_a", &NetworkParams::R_a)
      .def_readwrite("alpha", &NetworkParams::alpha)
      .def_readwrite("m_bar", &NetworkParams::m_bar)
      .def_readwrite("N", &NetworkParams::N)
      .def_readwrite("L", &NetworkParams::L)
      .def_readwrite("theta", &NetworkParams::theta)
      .def_readwrite("mu", &NetworkParams::mu)
      .def_readwrite("rho", &NetworkParams::rho)
      .def_readwrite("beta0", &NetworkParams::beta0)
      .def_readwrite("beta1", &NetworkParams::beta1)
      .def_readwrite("delta", &NetworkParams::delta)
      .def("validate", &NetworkParams::validate);

  m.def("digamma", &digamma, py::arg("x"));
  m.def("regularized_gamma_q", &regularized_gamma_q, py::arg("a"), py::arg("x"));
  m.def("chi", &chi, py::arg("params"));

  m.def("occupancy_pmf", [](double m_bar, int N, int L) { return occupancy_pmf(m_bar, N, L).c; }, py::arg("m_bar"),
        py::arg("N"), py::arg("L"));
  m.def("conditional_occupancy", &conditional_occupancy, py::arg("k"), py::arg("N"), py::arg("L"));
  m.def("kmax_for_tail", &kmax_for_tail, py::arg("m_bar"), py::arg("tau") = 1e-5);

  m.def(
      "laplace",
      [](const std::string& variant, const NetworkParams& p, double s, std::optional<std::vector<double>> c,
         double delta) {
        const OccupancyPMF pmf = c ? OccupancyPMF::from_probabilities(*c) : occupancy_pmf(p);
        py::gil_scoped_release release;
        return laplace(LaplaceModel::make(laplace_variant_from_string(variant), p, pmf), s, delta);
      },
      py::arg("variant"), py::arg("params"), py::arg("s"), py::arg("c") = py::none(), py::arg("delta") = 1.0);

  m.def(
      "delta_star",
      [](const NetworkParams& p) {
        const DeltaStar d = delta_star(p);
        return py::make_tuple(d.delta, d.residual, d.degenerate);
      },
      py::arg("params"));

  m.def(
      "analytic_metrics",
      [](const NetworkParams& p, const std::string& scheme, double fixed_a_fraction) {
        AnalyticReport r;
        {
          py::gil_scoped_release release;
          r = analytic_metrics(p, sim_scheme_from_string(scheme), fixed_a_fraction);
        }
        return analytic_dict(r);
      },
      py::arg("params"), py::arg("scheme") = "rrs", py::arg("fixed_a_fraction") = 0.5);

  m.def(
      "simulate",
      [](const NetworkParams& p, const std::string& scheme, long runs, std::uint64_t seed, int threads) {
        SimConfig cfg;
        cfg.scheme = sim_scheme_from_string(scheme);
        cfg.runs = runs;
        cfg.seed = seed;
        cfg.threads = threads;
        MetricReport r;
        {
          py::gil_scoped_release release;
          r = estimate_metrics(p, cfg);
        }
        return report_dict(r);
      },
      py::arg("params"), py::arg("scheme") = "rrs", py::arg("runs") = 1000, py::arg("seed") = 1,
      py::arg("threads") = 0);

  m.def(
      "run_table",
      [](const std::string& command, const std::string& scenario, const std::vector<std::string>& overrides) {
        const Scenario s = scenario_from(scenario, overrides);
        if (command == "pmf") return table_csv(pmf_table(s));
        if (command == "metrics") return table_csv(metrics_table(s));
        if (command == "delta-star") return table_csv(delta_star_table(s));
        if (command == "laplace") return table_csv(laplace_table(s));
        if (command == "success") return table_csv(success_table(s));
        throw py::value_error("unknown command '" + command + "'");
      },
      py::arg("command"), py::arg("scenario") = "", py::arg("overrides") = std::vector<std::string>{},
      "CSV text of a CLI table for a scenario given as text.");
}
