#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "aggsched/errors.hpp"

namespace aggsched {

struct QuadratureSpec {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-14;
  int max_subdivisions = 400;
  /// Envelope threshold for truncating semi-infinite oscillatory integrals.
  double oscillatory_cutoff_tolerance = 1e-9;

  /// Throws domain_error unless every tolerance is positive and max_subdivisions >= 1.
  void validate() const;

  static QuadratureSpec one_dimensional() { return {}; }
  static QuadratureSpec two_dimensional() { return {1e-6, 1e-30, 400, 1e-9}; }
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
};

template <class F>
Segment kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[7];
  double gauss = f_center * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 14> fv{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(f_center - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  }
  const double value = kronrod * half;
  asc *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double round = std::numeric_limits<double>::epsilon() * 50.0 * abs_sum * std::abs(half);
  if (round > std::numeric_limits<double>::min()) err = std::max(err, round);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
/// Throws accuracy_error if the tolerance is not met within max_subdivisions.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec) {
  if (a == b) return {0.0, 0.0, 0};
  auto cmp = [](const detail::Segment& x, const detail::Segment& y) { return x.error < y.error; };
  std::vector<detail::Segment> heap;
  heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 1);
  heap.push_back(detail::kronrod15(f, a, b));
  double total = heap.front().value;
  double error = heap.front().error;
  auto tolerance = [&] { return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total)); };
  while (error > tolerance()) {
    if (static_cast<int>(heap.size()) >= spec.max_subdivisions) {
      throw accuracy_error("integrate_adaptive: subdivision limit reached", total, error);
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      throw accuracy_error("integrate_adaptive: interval collapsed", total, error);
    }
    const detail::Segment left = detail::kronrod15(f, worst.a, mid);
    const detail::Segment right = detail::kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  // Re-sum to shed the drift of the running updates.
  CompensatedSum v;
  CompensatedSum e;
  for (const auto& s : heap) {
    v.add(s.value);
    e.add(s.error);
  }
  return {v.value(), e.value(), static_cast<int>(heap.size())};
}

/// Integrand shape hints for integrate_2d_polar.
struct PolarHints {
  /// Radius at which the integrand has a kink (added as an outer breakpoint).
  std::optional<double> radial_break;
  /// f(r, w) == f(r, 2 pi - w): integrate [0, pi] and double.
  bool even_in_angle = false;
};

/// Integral of f(r, w) over r in [0, R] and w in [0, 2 pi], measure dw dr.
/// The Jacobian r is part of f.
template <class F>
double integrate_2d_polar(F&& f, double radius, const QuadratureSpec& spec, const PolarHints& hints = {}) {
  spec.validate();
  if (!(radius > 0.0)) throw domain_error("integrate_2d_polar: radius must be positive");
  QuadratureSpec inner = spec;
  inner.relative_tolerance = spec.relative_tolerance * 0.1;
  const double angle_end = hints.even_in_angle ? std::numbers::pi : 2.0 * std::numbers::pi;
  const double angle_factor = hints.even_in_angle ? 2.0 : 1.0;
  auto outer = [&](double r) {
    auto g = [&](double w) { return f(r, w); };
    return angle_factor * integrate_adaptive(g, 0.0, angle_end, inner).value;
  };
  std::vector<double> cuts{0.0};
  if (hints.radial_break && *hints.radial_break > 0.0 && *hints.radial_break < radius) {
    cuts.push_back(*hints.radial_break);
  }
  cuts.push_back(radius);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += integrate_adaptive(outer, cuts[k], cuts[k + 1], spec).value;
  }
  return total;
}

/// Integral of f over [0, inf) using doubling panels [0, s], [s, 2s], [2s, 4s], ...
/// Stops when a panel falls below relative_tolerance of the running sum; a stable
/// geometric decay of panel values is extrapolated into a tail correction.
/// Throws domain_error if panel values stop decaying.
double integrate_semi_infinite(const std::function<double(double)>& f, const QuadratureSpec& spec,
                               double first_panel = 1.0);

/// (1/pi) * int_0^inf exp(-varsigma t^(2/alpha)) sin(varrho t^(2/alpha) - t B) / t dt.
/// Integrated panel-by-panel between consecutive zeros of the sine.
double integrate_gil_pelaez(double varsigma, double varrho, double location, double alpha,
                            const QuadratureSpec& spec = {});

/// Wynn epsilon extrapolation of a sequence of partial sums.
double wynn_epsilon(std::span<const double> partial_sums);

}  // namespace aggsched
