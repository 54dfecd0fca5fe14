#include "aggsched/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "aggsched/scheduling.hpp"

namespace aggsched {

namespace {

std::string format_message(const std::string& source, int line, const std::string& field, const std::string& message) {
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": ";
  if (!field.empty()) out += "field '" + field + "': ";
  return out + message;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Where a value came from, for diagnostics.
struct Origin {
  std::string source;
  int line;
  std::string field;
  [[noreturn]] void fail(const std::string& message) const { throw parse_error(source, line, field, message); }
};

double parse_double(const std::string& text, const Origin& at) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) at.fail("expected a number, got '" + t + "'");
  if (!std::isfinite(v)) at.fail("value must be finite");
  return v;
}

long long parse_integer(const std::string& text, const Origin& at) {
  const std::string t = trim(text);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    // Accept integral reals such as "30.0", which sweeps produce.
    const double d = parse_double(t, at);
    if (d != std::floor(d) || std::abs(d) > 9e15) at.fail("expected an integer, got '" + t + "'");
    return static_cast<long long>(d);
  }
  return v;
}

std::uint64_t parse_seed(const std::string& text, const Origin& at) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    const long long s = parse_integer(t, at);
    if (s < 0) at.fail("seed must be non-negative");
    return static_cast<std::uint64_t>(s);
  }
  return v;
}

bool parse_bool(const std::string& text, const Origin& at) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  at.fail("expected true or false, got '" + t + "'");
}

std::vector<double> parse_list(const std::string& text, const Origin& at) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    // start:step:stop ranges, inclusive of stop within rounding
    if (t.find(':') != std::string::npos) {
      std::vector<double> parts;
      std::stringstream rs(t);
      std::string p;
      while (std::getline(rs, p, ':')) parts.push_back(parse_double(p, at));
      if (parts.size() != 3 || parts[1] == 0.0) at.fail("range must be start:step:stop with a nonzero step");
      const double n = std::floor((parts[2] - parts[0]) / parts[1] + 1e-9);
      if (n < 0 || n > 1e6) at.fail("range is empty or too long");
      for (long k = 0; k <= static_cast<long>(n); ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[1]);
    } else {
      out.push_back(parse_double(t, at));
    }
  }
  if (out.empty()) at.fail("empty list");
  return out;
}

int to_int(long long v, const Origin& at) {
  if (v < -2147483647LL || v > 2147483647LL) at.fail("integer out of range");
  return static_cast<int>(v);
}

using Setter = std::function<void(Scenario&, const std::string&, const Origin&)>;

struct Field {
  const char* section;
  const char* key;
  bool sweepable;
  Setter set;
  std::function<std::string(const Scenario&)> get;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"network", "lambda_a_log10_per_m2", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.lambda_a = std::pow(10.0, parse_double(v, o)); },
       [](const Scenario& s) { return num(std::log10(s.network.lambda_a)); }},
      {"network", "lambda_a_per_m2", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.lambda_a = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.lambda_a); }},
      {"network", "R_a_m", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.R_a = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.R_a); }},
      {"network", "alpha", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.alpha = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.alpha); }},
      {"network", "m_bar", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.m_bar = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.m_bar); }},
      {"network", "N", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.N = to_int(parse_integer(v, o), o); },
       [](const Scenario& s) { return std::to_string(s.network.N); }},
      {"network", "L", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.L = to_int(parse_integer(v, o), o); },
       [](const Scenario& s) { return std::to_string(s.network.L); }},
      {"network", "theta", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.theta = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.theta); }},
      {"network", "theta_db", true,
       [](Scenario& s, const std::string& v, const Origin& o) {
         s.network.theta = std::pow(10.0, parse_double(v, o) / 10.0);
       },
       [](const Scenario& s) { return num(10.0 * std::log10(s.network.theta)); }},
      {"network", "mu", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.mu = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.mu); }},
      {"network", "rho", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.rho = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.rho); }},
      {"network", "beta0", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.beta0 = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.beta0); }},
      {"network", "beta1", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.network.beta1 = parse_double(v, o); },
       [](const Scenario& s) { return num(s.network.beta1); }},
      {"network", "delta", true,
       [](Scenario& s, const std::string& v, const Origin& o) {
         s.delta_given = true;
         if (lower(trim(v)) == "star") {
           s.delta_is_star = true;
         } else {
           s.network.delta = parse_double(v, o);
           s.delta_is_star = false;
         }
       },
       [](const Scenario& s) { return num(s.network.delta); }},
      {"simulation", "runs", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.sim.runs = parse_integer(v, o); },
       [](const Scenario& s) { return std::to_string(s.sim.runs); }},
      {"simulation", "expected_aggregators", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.sim.expected_aggregators = parse_double(v, o); },
       [](const Scenario& s) { return num(s.sim.expected_aggregators); }},
      {"simulation", "seed", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.sim.seed = parse_seed(v, o); },
       [](const Scenario& s) { return std::to_string(s.sim.seed); }},
      {"simulation", "scheme", false,
       [](Scenario& s, const std::string& v, const Origin& o) {
         try {
           s.sim.scheme = sim_scheme_from_string(lower(trim(v)));
         } catch (const std::exception&) {
           o.fail("unknown scheme '" + trim(v) + "' (oma, rrs, crs_fixed, crs_theorem4)");
         }
       },
       [](const Scenario& s) { return std::string(to_string(s.sim.scheme)); }},
      {"simulation", "record_per_rank", false,
       [](Scenario& s, const std::string& v, const Origin& o) { s.sim.record_per_rank = parse_bool(v, o); },
       [](const Scenario& s) { return std::string(s.sim.record_per_rank ? "true" : "false"); }},
      {"simulation", "fixed_a_fraction", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.sim.fixed_a_fraction = parse_double(v, o); },
       [](const Scenario& s) { return num(s.sim.fixed_a_fraction); }},
      {"simulation", "threads", false,
       [](Scenario& s, const std::string& v, const Origin& o) { s.sim.threads = to_int(parse_integer(v, o), o); },
       [](const Scenario& s) { return std::to_string(s.sim.threads); }},
      {"analysis", "laplace_variant", false,
       [](Scenario& s, const std::string& v, const Origin& o) {
         try {
           s.analysis.rrs_variant = laplace_variant_from_string(lower(trim(v)));
         } catch (const std::exception&) {
           o.fail("unknown Laplace variant '" + trim(v) + "'");
         }
         if (s.analysis.rrs_variant == LaplaceVariant::crs_weighted ||
             s.analysis.rrs_variant == LaplaceVariant::crs_exact_fixed_marks) {
           o.fail("laplace_variant selects the RRS transform (rrs_exact, rrs_upper, rrs_lower, rrs_weighted)");
         }
       },
       [](const Scenario& s) { return std::string(to_string(s.analysis.rrs_variant)); }},
      {"analysis", "tau", true,
       [](Scenario& s, const std::string& v, const Origin& o) { s.analysis.tau = parse_double(v, o); },
       [](const Scenario& s) { return num(s.analysis.tau); }},
      {"analysis", "s_db", false,
       [](Scenario& s, const std::string& v, const Origin& o) { s.analysis.s_db = parse_list(v, o); },
       [](const Scenario& s) { return std::to_string(s.analysis.s_db.size()) + " points"; }},
      {"output", "path", false, [](Scenario& s, const std::string& v, const Origin&) { s.output.path = trim(v); },
       [](const Scenario& s) { return s.output.path; }},
      {"output", "format", false,
       [](Scenario& s, const std::string& v, const Origin& o) {
         const std::string f = lower(trim(v));
         if (f != "csv" && f != "json") o.fail("format must be csv or json");
         s.output.format = f;
       },
       [](const Scenario& s) { return s.output.format; }},
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

const Field* find_sweepable(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.sweepable && key == f.key) return &f;
  }
  return nullptr;
}

void assign(Scenario& s, const std::string& section, const std::string& key, const std::string& value,
            const Origin& at) {
  if (section == "sweep") {
    if (!s.sweep) s.sweep = Sweep{};
    if (key == "parameter") {
      const std::string name = trim(value);
      if (!find_sweepable(name)) {
        Origin o = at;
        o.field = name;
        o.fail("sweep parameter is not a sweepable network, simulation or analysis field");
      }
      s.sweep->parameter = name;
    } else if (key == "values") {
      s.sweep->values = parse_list(value, at);
    } else {
      at.fail("unknown key in [sweep] (parameter, values)");
    }
    return;
  }
  const Field* f = find_field(section, key);
  if (!f) at.fail("unknown key in [" + section + "]");
  f->set(s, value, at);
}

bool known_section(const std::string& s) {
  return s == "network" || s == "simulation" || s == "analysis" || s == "sweep" || s == "output";
}

}  // namespace

parse_error::parse_error(const std::string& source, int line, const std::string& field, const std::string& message)
    : std::runtime_error(format_message(source, line, field, message)), line_(line), field_(field) {}

Scenario default_scenario() {
  Scenario s;
  s.analysis.s_db.reserve(41);
  for (int k = 0; k <= 40; ++k) s.analysis.s_db.push_back(-20.0 + k);
  return s;
}

Scenario parse_scenario(std::istream& in, const std::string& source) {
  Scenario s = default_scenario();
  std::string section;
  std::string raw;
  int line = 0;
  bool lambda_log = false;
  bool lambda_lin = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    const auto hash = text.find_first_of("#;");
    if (hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw parse_error(source, line, "", "unterminated section header");
      section = lower(trim(std::string_view(text).substr(1, text.size() - 2)));
      if (!known_section(section)) {
        throw parse_error(source, line, section, "unknown section (network, simulation, analysis, sweep, output)");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw parse_error(source, line, "", "expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (section.empty()) throw parse_error(source, line, key, "key outside of any section");
    if (key.empty()) throw parse_error(source, line, "", "missing key");
    if (value.empty()) throw parse_error(source, line, key, "missing value");
    if (section == "network" && key == "lambda_a_log10_per_m2") lambda_log = true;
    if (section == "network" && key == "lambda_a_per_m2") lambda_lin = true;
    if (lambda_log && lambda_lin) {
      throw parse_error(source, line, key, "give either lambda_a_log10_per_m2 or lambda_a_per_m2, not both");
    }
    assign(s, section, key, value, Origin{source, line, key});
  }
  if (s.sweep) {
    if (s.sweep->parameter.empty()) throw parse_error(source, 0, "parameter", "[sweep] needs a parameter");
    if (s.sweep->values.empty()) throw parse_error(source, 0, "values", "[sweep] needs values");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "", "cannot open scenario file");
  return parse_scenario(in, path);
}

void apply_override(Scenario& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw parse_error("--set", 0, assignment, "expected key=value");
  std::string key = trim(std::string_view(assignment).substr(0, eq));
  const std::string value = trim(std::string_view(assignment).substr(eq + 1));
  std::string section;
  if (const auto dot = key.find('.'); dot != std::string::npos) {
    section = lower(key.substr(0, dot));
    key = key.substr(dot + 1);
  } else {
    int matches = 0;
    for (const auto& f : fields()) {
      if (key == f.key) {
        section = f.section;
        ++matches;
      }
    }
    if (key == "parameter" || key == "values") {
      section = "sweep";
      ++matches;
    }
    if (matches == 0) throw parse_error("--set", 0, key, "unknown field");
    if (matches > 1) throw parse_error("--set", 0, key, "ambiguous field; qualify it as section.key");
  }
  if (!known_section(section)) throw parse_error("--set", 0, section, "unknown section");
  if (value.empty()) throw parse_error("--set", 0, key, "missing value");
  assign(s, section, key, value, Origin{"--set", 0, key});
}

std::vector<std::string> sweepable_fields() {
  std::vector<std::string> out;
  for (const auto& f : fields()) {
    if (f.sweepable) out.emplace_back(f.key);
  }
  return out;
}

void resolve(Scenario& s) {
  s.network.validate();
  s.sim.validate(s.network);
  if (!(s.analysis.tau > 0.0 && s.analysis.tau < 1.0)) throw domain_error("analysis: tau must lie in (0, 1)");
  if (s.sim.fixed_a_fraction <= 0.0 || s.sim.fixed_a_fraction >= 1.0) {
    throw domain_error("simulation: fixed_a_fraction must lie in (0, 1)");
  }
  if (s.delta_is_star) {
    s.network.delta = delta_star(s.network).delta;
    s.network.validate();
  }
}

std::vector<SweepPoint> expand(const Scenario& s) {
  std::vector<SweepPoint> out;
  if (!s.sweep) {
    SweepPoint p{0.0, s};
    resolve(p.scenario);
    out.push_back(std::move(p));
    return out;
  }
  const Field* f = find_sweepable(s.sweep->parameter);
  if (!f) throw parse_error("[sweep]", 0, s.sweep->parameter, "not a sweepable field");
  for (double x : s.sweep->values) {
    SweepPoint p{x, s};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    f->set(p.scenario, buf, Origin{"[sweep]", 0, s.sweep->parameter});
    resolve(p.scenario);
    out.push_back(std::move(p));
  }
  return out;
}

std::string describe(const Scenario& s) {
  std::string out;
  auto add = [&](const std::string& k, const std::string& v) {
    if (!out.empty()) out += ' ';
    out += k + '=' + v;
  };
  for (const auto& f : fields()) {
    const std::string key = f.key;
    if (key == "lambda_a_log10_per_m2" || key == "theta_db" || key == "s_db" || key == "path" || key == "format" ||
        key == "threads") {
      continue;
    }
    add(key, f.get(s));
  }
  if (s.delta_is_star) out += " (delta=star)";
  return out;
}

}  // namespace aggsched
