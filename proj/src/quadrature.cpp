#include "aggsched/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace aggsched {

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0) || !(oscillatory_cutoff_tolerance > 0.0)) {
    throw domain_error("QuadratureSpec: tolerances must be strictly positive");
  }
  if (max_subdivisions < 1) throw domain_error("QuadratureSpec: max_subdivisions must be >= 1");
}

double integrate_semi_infinite(const std::function<double(double)>& f, const QuadratureSpec& spec,
                               double first_panel) {
  spec.validate();
  if (!(first_panel > 0.0)) throw domain_error("integrate_semi_infinite: first panel must be positive");

  constexpr int kMaxPanels = 600;
  CompensatedSum sum;
  double lo = 0.0;
  double hi = first_panel;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double prev_ratio = std::numeric_limits<double>::quiet_NaN();
  int non_decaying = 0;

  for (int k = 0; k < kMaxPanels; ++k) {
    QuadratureSpec panel = spec;
    panel.absolute_tolerance = std::max(spec.absolute_tolerance, 0.1 * spec.relative_tolerance * std::abs(sum.value()));
    const double p = integrate_adaptive(f, lo, hi, panel).value;
    if (!std::isfinite(p)) throw domain_error("integrate_semi_infinite: non-finite panel value");
    sum.add(p);
    const double total = sum.value();
    const double ratio = p / prev;

    if (k >= 2) {
      const bool geometric = ratio > 0.0 && ratio < 0.95 && prev_ratio > 0.0 && prev_ratio < 0.95;
      const double tail = geometric ? p * ratio / (1.0 - ratio) : 0.0;
      if (std::abs(p) <= spec.absolute_tolerance || std::abs(p) <= spec.relative_tolerance * std::abs(total)) {
        return total + tail;
      }
      if (geometric && std::abs(ratio - prev_ratio) <= 1e-3 * ratio &&
          std::abs(tail) <= 1e3 * spec.relative_tolerance * std::abs(total)) {
        return total + tail;
      }
      non_decaying = (std::abs(ratio) >= 1.0) ? non_decaying + 1 : 0;
      if (non_decaying >= 8) throw domain_error("integrate_semi_infinite: integrand does not decay");
    }
    prev_ratio = ratio;
    prev = p;
    lo = hi;
    hi *= 2.0;
  }
  throw accuracy_error("integrate_semi_infinite: panel limit reached", sum.value(), std::abs(prev));
}

double wynn_epsilon(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  if (n < 3) return s.back();
  std::vector<double> before(n + 1, 0.0);
  std::vector<double> current(s.begin(), s.end());
  double best = s.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> next(current.size() - 1);
    for (std::size_t j = 0; j + 1 < current.size(); ++j) {
      const double diff = current[j + 1] - current[j];
      if (diff == 0.0 || !std::isfinite(diff)) return best;
      next[j] = before[j + 1] + 1.0 / diff;
      if (!std::isfinite(next[j])) return best;
    }
    before = std::move(current);
    current = std::move(next);
    if (k % 2 == 0) best = current.back();
  }
  return best;
}

namespace {

// Phase g(u) = varrho u - B u^p of the substituted Gil-Pelaez integrand, u = t^(2/alpha).
struct Phase {
  double varrho;
  double location;
  double power;
  double operator()(double u) const { return varrho * u - location * std::pow(u, power); }
};

// Root of g(u) = target on (lo, hi) where g - target changes sign; bisection.
double bisect(const Phase& g, double target, double lo, double hi) {
  const bool lo_below = g(lo) < target;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((g(mid) < target) == lo_below) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

// Root of a monotone g(u) = target beyond lo; grows the bracket geometrically.
double bisect_unbounded(const Phase& g, double target, double lo, bool increasing) {
  double hi = std::max(2.0 * lo, lo + 1.0);
  for (int it = 0; it < 2000; ++it) {
    const double v = g(hi);
    if (increasing ? v >= target : v <= target) return bisect(g, target, lo, hi);
    lo = hi;
    hi *= 2.0;
  }
  throw accuracy_error("integrate_gil_pelaez: could not bracket a phase root", 0.0, 0.0);
}

}  // namespace

double integrate_gil_pelaez(double varsigma, double varrho, double location, double alpha,
                            const QuadratureSpec& spec) {
  spec.validate();
  if (!(alpha > 2.0)) throw domain_error("integrate_gil_pelaez: alpha must exceed 2");
  if (!(varsigma >= 0.0) || !(varrho >= 0.0) || !std::isfinite(location)) {
    throw domain_error("integrate_gil_pelaez: varsigma, varrho must be non-negative and B finite");
  }
  if (varrho == 0.0 && location == 0.0) return 0.0;

  constexpr double pi = std::numbers::pi;
  const double p = 0.5 * alpha;
  const Phase g{varrho, location, p};

  // exp(-varsigma u) sin(g(u)) / u, written as (g/u) * sinc(g) so small u is exact.
  auto integrand = [&](double u) {
    const double x = g(u);
    const double x_over_u = varrho - location * std::pow(u, p - 1.0);
    const double sinc = std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return std::exp(-varsigma * u) * x_over_u * sinc;
  };

  enum class Mode { rising_to_peak, falling, rising };
  Mode mode = Mode::rising;
  double peak = 0.0;
  double peak_value = 0.0;
  if (location > 0.0 && varrho > 0.0) {
    mode = Mode::rising_to_peak;
    peak = std::pow(varrho / (p * location), 1.0 / (p - 1.0));
    peak_value = g(peak);
  } else if (location > 0.0) {
    mode = Mode::falling;
  }
  long level = 0;  // phase of the current breakpoint is level * pi
  if (mode == Mode::falling) level = 0;

  QuadratureSpec panel_spec = spec;
  panel_spec.absolute_tolerance = std::max(spec.absolute_tolerance, 1e-2 * spec.oscillatory_cutoff_tolerance);

  constexpr long kMaxPanels = 2'000'000;
  constexpr std::size_t kWynnWindow = 21;
  const double cutoff = spec.oscillatory_cutoff_tolerance;
  CompensatedSum sum;
  std::vector<double> partial;
  double u = 0.0;
  double last_term = std::numeric_limits<double>::infinity();
  double last_extrapolation = std::numeric_limits<double>::quiet_NaN();
  int stable_extrapolations = 0;
  int panels_after_peak = 0;

  for (long k = 0; k < kMaxPanels; ++k) {
    double next = 0.0;
    switch (mode) {
      case Mode::rising_to_peak: {
        const double target = static_cast<double>(level + 1) * pi;
        if (target >= peak_value) {
          next = peak;
          mode = Mode::falling;
          level = static_cast<long>(std::floor(peak_value / pi));
          if (static_cast<double>(level) * pi >= peak_value) --level;
          ++level;  // the falling branch steps down from here
        } else {
          next = bisect(g, target, u, peak);
          ++level;
        }
        break;
      }
      case Mode::falling: {
        --level;
        next = bisect_unbounded(g, static_cast<double>(level) * pi, u, false);
        break;
      }
      case Mode::rising: {
        ++level;
        next = bisect_unbounded(g, static_cast<double>(level) * pi, u, true);
        break;
      }
    }
    if (!(next > u)) {
      throw accuracy_error("integrate_gil_pelaez: breakpoints stopped advancing", sum.value() * p / pi, 0.0);
    }
    const double term = integrate_adaptive(integrand, u, next, panel_spec).value;
    sum.add(term);
    u = next;
    const double total = sum.value();
    if (mode == Mode::rising_to_peak) {
      last_term = std::abs(term);
      continue;
    }
    // The panels next to the peak and the first zero can be slivers; only full
    // half-periods count towards the truncation test.
    ++panels_after_peak;
    const double scale = std::max(std::abs(total), 1.0);
    if (panels_after_peak > 3 && std::abs(term) < cutoff * scale && last_term < cutoff * scale) {
      return total * p / pi;
    }
    last_term = std::abs(term);

    partial.push_back(total);
    if (partial.size() >= 9) {
      const std::size_t count = std::min(partial.size(), kWynnWindow);
      const std::size_t odd = count % 2 == 1 ? count : count - 1;
      const double ext = wynn_epsilon(std::span<const double>(partial).last(odd));
      if (std::abs(ext - last_extrapolation) <= cutoff * std::max(std::abs(ext), 1.0)) {
        if (++stable_extrapolations >= 3) return ext * p / pi;
      } else {
        stable_extrapolations = 0;
      }
      last_extrapolation = ext;
    }
    if (partial.size() > 4 * kWynnWindow) partial.erase(partial.begin(), partial.end() - kWynnWindow);
  }
  throw accuracy_error("integrate_gil_pelaez: panel limit reached", sum.value() * p / pi, last_term);
}

}  // namespace aggsched
