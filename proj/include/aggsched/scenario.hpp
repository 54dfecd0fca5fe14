#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggsched/laplace.hpp"
#include "aggsched/montecarlo.hpp"
#include "aggsched/params.hpp"

namespace aggsched {

/// Malformed scenario input. line() is 0 for command-line overrides.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& source, int line, const std::string& field, const std::string& message);
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

struct AnalysisOptions {
  LaplaceVariant rrs_variant = LaplaceVariant::rrs_exact;
  double tau = 1e-5;
  std::vector<double> s_db;  // Laplace argument grid in dB
};

struct Sweep {
  std::string parameter;
  std::vector<double> values;
};

struct OutputOptions {
  std::string path;  // empty writes to stdout
  std::string format = "csv";
};

/// A fully parsed scenario: [network], [simulation], [analysis], [sweep], [output].
struct Scenario {
  NetworkParams network;
  bool delta_is_star = false;
  /// delta appeared in the input (as a number or star).
  bool delta_given = false;
  SimConfig sim;
  AnalysisOptions analysis;
  std::optional<Sweep> sweep;
  OutputOptions output;
};

/// Default scenario with the 41-point s grid from -20 dB to 20 dB.
Scenario default_scenario();

Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

/// Applies "key=value" or "section.key=value"; bare keys must be unambiguous.
void apply_override(Scenario& s, const std::string& assignment);

/// Names accepted as a sweep axis.
std::vector<std::string> sweepable_fields();

/// One scenario per sweep value (or the scenario itself), with delta = star resolved and
/// every parameter validated. The sweep value is returned alongside.
struct SweepPoint {
  double x = 0.0;
  Scenario scenario;
};
std::vector<SweepPoint> expand(const Scenario& s);

/// Resolves delta = star and validates; throws domain_error on invalid parameters.
void resolve(Scenario& s);

/// Single-line "key=value" rendering of every resolved parameter.
std::string describe(const Scenario& s);

}  // namespace aggsched
