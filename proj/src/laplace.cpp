#include "aggsched/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace aggsched {

const char* to_string(LaplaceVariant v) {
  switch (v) {
    case LaplaceVariant::rrs_exact: return "rrs_exact";
    case LaplaceVariant::rrs_upper: return "rrs_upper";
    case LaplaceVariant::rrs_lower: return "rrs_lower";
    case LaplaceVariant::rrs_weighted: return "rrs_weighted";
    case LaplaceVariant::crs_weighted: return "crs_weighted";
    case LaplaceVariant::crs_exact_fixed_marks: return "crs_exact_fixed_marks";
  }
  return "unknown";
}

LaplaceVariant laplace_variant_from_string(const std::string& name) {
  for (auto v : {LaplaceVariant::rrs_exact, LaplaceVariant::rrs_upper, LaplaceVariant::rrs_lower,
                 LaplaceVariant::rrs_weighted, LaplaceVariant::crs_weighted, LaplaceVariant::crs_exact_fixed_marks}) {
    if (name == to_string(v)) return v;
  }
  throw domain_error("unknown Laplace variant '" + name + "'");
}

LaplaceModel LaplaceModel::make(LaplaceVariant variant, const NetworkParams& params) {
  return make(variant, params, occupancy_pmf(params));
}

LaplaceModel LaplaceModel::make(LaplaceVariant variant, const NetworkParams& params, const OccupancyPMF& pmf) {
  params.validate();
  LaplaceModel m;
  m.variant = variant;
  m.params = params;
  m.pmf = pmf;
  m.chi = aggsched::chi(params);
  return m;
}

double upsilon_complement(double r_w, double s, double R, double alpha, const QuadratureSpec& spec) {
  if (!(s >= 0.0)) throw domain_error("upsilon: s must be non-negative");
  if (!(r_w >= 0.0) || !(R > 0.0) || !(alpha > 2.0)) throw domain_error("upsilon: invalid geometry");
  if (s == 0.0) return 0.0;
  const double half_alpha = 0.5 * alpha;
  auto f = [&](double r, double w) {
    const double d2 = r_w * r_w + r * r + 2.0 * r_w * r * std::cos(w);
    if (d2 <= 0.0) return r;
    const double x = s * std::pow(r * r / d2, half_alpha);
    return r * x / (1.0 + x);
  };
  PolarHints hints;
  hints.even_in_angle = true;
  if (r_w > 0.0 && r_w < R) hints.radial_break = r_w;
  const double v = integrate_2d_polar(f, R, spec, hints) / (std::numbers::pi * R * R);
  return std::clamp(v, 0.0, 1.0);
}

double upsilon(double r_w, double s, double R, double alpha, const QuadratureSpec& spec) {
  return 1.0 - upsilon_complement(r_w, s, R, alpha, spec);
}

namespace {

void require_rrs(const LaplaceModel& m) {
  switch (m.variant) {
    case LaplaceVariant::rrs_exact:
    case LaplaceVariant::rrs_upper:
    case LaplaceVariant::rrs_lower:
    case LaplaceVariant::rrs_weighted: return;
    default: throw domain_error(std::string("laplace_rrs: variant ") + to_string(m.variant) + " is not an RRS variant");
  }
}

double upper_exponent(const LaplaceModel& m) {
  double sum = 0.0;
  for (int u = 1; u <= m.pmf.L(); ++u) sum += m.pmf.c[u] * std::pow(static_cast<double>(u), 2.0 / m.params.alpha);
  return m.chi * sum;
}

// 2 pi lambda int_0^inf r_w g(r_w) dr_w for g <= 0 built from interferer complements.
template <class G>
double cluster_exponent(const LaplaceModel& m, G&& g) {
  QuadratureSpec outer = m.spec;
  outer.absolute_tolerance = 1e-300;
  auto integrand = [&](double r_w) { return r_w * g(r_w); };
  const double integral = integrate_semi_infinite(integrand, outer, m.params.R_a);
  return 2.0 * std::numbers::pi * m.params.lambda_a * integral;
}

}  // namespace

double laplace_rrs_exact_exponent(const LaplaceModel& m, double s) {
  if (!(s >= 0.0)) throw domain_error("laplace_rrs: s must be non-negative");
  if (s == 0.0) return 0.0;
  const auto& p = m.params;
  return cluster_exponent(m, [&](double r_w) {
    const double eps = upsilon_complement(r_w, s, p.R_a, p.alpha, m.spec);
    const double log_ups = std::log1p(-std::min(eps, 1.0 - 1e-300));
    double v = 0.0;
    for (int u = 1; u <= m.pmf.L(); ++u) v += m.pmf.c[u] * std::expm1(u * log_ups);
    return v;
  });
}

double laplace_rrs(const LaplaceModel& m, double s) {
  require_rrs(m);
  if (!(s >= 0.0)) throw domain_error("laplace_rrs: s must be non-negative");
  if (s == 0.0) return 1.0;
  const double s_pow = std::pow(s, 2.0 / m.params.alpha);
  const double up = std::exp(-upper_exponent(m) * s_pow);
  const double lo = std::exp(-m.chi * m.pmf.c_bar * s_pow);
  switch (m.variant) {
    case LaplaceVariant::rrs_exact: return std::exp(laplace_rrs_exact_exponent(m, s));
    case LaplaceVariant::rrs_upper: return up;
    case LaplaceVariant::rrs_lower: return lo;
    case LaplaceVariant::rrs_weighted: return m.params.beta0 * up + m.params.beta1 * lo;
    default: break;
  }
  throw domain_error("laplace_rrs: unreachable variant");
}

double crs_nu(const LaplaceModel& m, int t, double delta) {
  if (t != 1 && t != 2) throw domain_error("crs_nu: t must be 1 or 2");
  if (m.pmf.L() > 2) throw domain_error("laplace_crs: CRS is defined for L <= 2");
  const double a = m.params.alpha;
  return m.chi * (m.pmf.at(1) + m.pmf.at(2) * std::pow(static_cast<double>(t), (a - 2.0) / a) * std::pow(delta, 2.0 / a));
}

double laplace_crs(const LaplaceModel& m, double s, double delta) {
  if (!(s >= 0.0)) throw domain_error("laplace_crs: s must be non-negative");
  if (!(delta > 0.0)) throw domain_error("laplace_crs: delta must be positive");
  if (m.pmf.L() > 2) throw domain_error("laplace_crs: CRS is defined for L <= 2");
  if (s == 0.0) return 1.0;
  const auto& p = m.params;
  if (m.variant == LaplaceVariant::crs_weighted) {
    const double s_pow = std::pow(s, 2.0 / p.alpha);
    return p.beta0 * std::exp(-crs_nu(m, 1, delta) * s_pow) + p.beta1 * std::exp(-crs_nu(m, 2, delta) * s_pow);
  }
  if (m.variant == LaplaceVariant::crs_exact_fixed_marks) {
    if (!m.reference) throw domain_error("laplace_crs: crs_exact_fixed_marks needs the reference flag");
    const double a = m.fixed_a;
    const double b = delta - a;
    if (!(a > 0.0 && b > 0.0)) throw domain_error("laplace_crs: fixed marks must satisfy 0 < a < delta");
    const double c1 = m.pmf.at(1);
    const double c2 = m.pmf.at(2);
    const double e = cluster_exponent(m, [&](double r_w) {
      double v = 0.0;
      if (c1 > 0.0) v -= c1 * upsilon_complement(r_w, s, p.R_a, p.alpha, m.spec);
      if (c2 > 0.0) {
        const double ua = upsilon_complement(r_w, a * s, p.R_a, p.alpha, m.spec);
        const double ub = upsilon_complement(r_w, b * s, p.R_a, p.alpha, m.spec);
        v -= c2 * (ua + ub - ua * ub);
      }
      return v;
    });
    return std::exp(e);
  }
  throw domain_error(std::string("laplace_crs: variant ") + to_string(m.variant) + " is not a CRS variant");
}

std::complex<double> laplace_crs_weighted(const LaplaceModel& m, std::complex<double> s, double delta) {
  const double a = m.params.alpha;
  const std::complex<double> s_pow = std::abs(s) == 0.0 ? std::complex<double>(0.0) : std::pow(s, 2.0 / a);
  return m.params.beta0 * std::exp(-crs_nu(m, 1, delta) * s_pow) + m.params.beta1 * std::exp(-crs_nu(m, 2, delta) * s_pow);
}

double laplace(const LaplaceModel& m, double s, double delta) {
  switch (m.variant) {
    case LaplaceVariant::crs_weighted:
    case LaplaceVariant::crs_exact_fixed_marks: return laplace_crs(m, s, delta);
    default: return laplace_rrs(m, s);
  }
}

}  // namespace aggsched
