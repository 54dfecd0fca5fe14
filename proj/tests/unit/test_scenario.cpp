#include <doctest.h>

#include <cmath>
#include <sstream>

#include "aggsched/scenario.hpp"

using namespace aggsched;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "test.ini");
}

}  // namespace

TEST_CASE("a full scenario parses with units in the field names") {
  const Scenario s = parse(R"(
# defaults from the evaluation section
[network]
lambda_a_log10_per_m2 = -4.4
R_a_m = 40
alpha = 3.6
m_bar = 60
N = 30   ; inline comment
L = 2
theta = 1
mu = 0.1
delta = star

[simulation]
runs = 2000
seed = 18446744073709551615
scheme = crs_theorem4
record_per_rank = yes

[sweep]
parameter = N
values = 10, 20:10:40

[output]
path = out
format = json
)");
  CHECK(s.network.lambda_a == doctest::Approx(std::pow(10.0, -4.4)).epsilon(1e-15));
  CHECK(s.network.mu == 0.1);
  CHECK(s.delta_is_star);
  CHECK(s.sim.runs == 2000);
  CHECK(s.sim.seed == 18446744073709551615ULL);
  CHECK(s.sim.scheme == SimScheme::crs_theorem4);
  CHECK(s.sim.record_per_rank);
  REQUIRE(s.sweep);
  CHECK(s.sweep->values == std::vector<double>{10, 20, 30, 40});
  CHECK(s.output.format == "json");
  CHECK(s.output.path == "out");
  CHECK(s.analysis.s_db.size() == 41);
}

TEST_CASE("parse errors carry line and field") {
  auto fails_at = [](const std::string& text, int line, const std::string& field) {
    try {
      parse(text);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line() == line);
      CHECK(e.field() == field);
      CHECK(std::string(e.what()).find("test.ini") != std::string::npos);
    }
  };
  fails_at("[network]\nalpha = three\n", 2, "alpha");
  fails_at("[network]\nbogus = 1\n", 2, "bogus");
  fails_at("[netwrk]\n", 1, "netwrk");
  fails_at("alpha = 3\n", 1, "alpha");
  fails_at("[network]\nN = 3.5\n", 2, "N");
  fails_at("[network]\nlambda_a_per_m2 = 1e-4\nlambda_a_log10_per_m2 = -4\n", 3, "lambda_a_log10_per_m2");
  fails_at("[sweep]\nparameter = colour\n", 2, "colour");
  fails_at("[simulation]\nscheme = tdma\n", 2, "scheme");
  fails_at("[output]\nformat = xml\n", 2, "format");
  fails_at("[network]\njust some words\n", 2, "");
}

TEST_CASE("overrides") {
  Scenario s = default_scenario();
  apply_override(s, "N=12");
  apply_override(s, "network.theta_db=3");
  apply_override(s, "simulation.seed=99");
  apply_override(s, "delta=0.8");
  CHECK(s.network.N == 12);
  CHECK(s.network.theta == doctest::Approx(std::pow(10.0, 0.3)));
  CHECK(s.sim.seed == 99);
  CHECK(s.network.delta == 0.8);
  CHECK(s.delta_given);
  CHECK_THROWS_AS(apply_override(s, "nonsense=1"), parse_error);
  CHECK_THROWS_AS(apply_override(s, "N"), parse_error);
  CHECK_THROWS_AS(apply_override(s, "network.runs=3"), parse_error);
}

TEST_CASE("sweep expansion resolves each point") {
  Scenario s = parse("[network]\ndelta = star\n[sweep]\nparameter = N\nvalues = 10, 30, 60\n");
  const auto pts = expand(s);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].scenario.network.N == 10);
  CHECK(pts[2].scenario.network.N == 60);
  CHECK(pts[1].scenario.network.delta == doctest::Approx(0.744400974785553).epsilon(1e-12));
  CHECK(pts[0].scenario.network.delta != pts[1].scenario.network.delta);
}

TEST_CASE("invalid parameters surface as domain errors on resolution") {
  Scenario s = default_scenario();
  apply_override(s, "alpha=1.5");
  CHECK_THROWS_AS(expand(s), domain_error);
}

TEST_CASE("describe lists the resolved parameter set") {
  Scenario s = default_scenario();
  const std::string d = describe(s);
  for (const char* key : {"lambda_a_per_m2=", "R_a_m=40", "alpha=3.6", "m_bar=60", "N=30", "L=2", "theta=1", "mu=0",
                          "delta=1", "runs=50000", "seed=1", "scheme=rrs"}) {
    CHECK(d.find(key) != std::string::npos);
  }
}
