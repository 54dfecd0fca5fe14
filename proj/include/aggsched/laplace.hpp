#pragma once

#include <complex>

#include "aggsched/occupancy.hpp"
#include "aggsched/params.hpp"
#include "aggsched/quadrature.hpp"

namespace aggsched {

enum class LaplaceVariant { rrs_exact, rrs_upper, rrs_lower, rrs_weighted, crs_weighted, crs_exact_fixed_marks };

const char* to_string(LaplaceVariant v);
LaplaceVariant laplace_variant_from_string(const std::string& name);

/// Interference Laplace transform selector. pmf describes the per-channel occupancy of the
/// interfering clusters and may be set independently of params (synthetic mixes).
struct LaplaceModel {
  LaplaceVariant variant = LaplaceVariant::rrs_weighted;
  double chi = 0.0;
  NetworkParams params;
  OccupancyPMF pmf;
  /// crs_exact_fixed_marks only: every sharing pair carries marks (a, delta - a).
  double fixed_a = 0.5;
  /// crs_exact_fixed_marks is a slow reference and refuses to run unless this is set.
  bool reference = false;
  QuadratureSpec spec = QuadratureSpec::two_dimensional();

  static LaplaceModel make(LaplaceVariant variant, const NetworkParams& params);
  static LaplaceModel make(LaplaceVariant variant, const NetworkParams& params, const OccupancyPMF& pmf);
};

/// 1 - Upsilon(r_w, s): one interferer at offset uniform in the disc of radius R around a
/// center at distance r_w, unit exponential fading.
double upsilon_complement(double r_w, double s, double R, double alpha,
                          const QuadratureSpec& spec = QuadratureSpec::two_dimensional());
double upsilon(double r_w, double s, double R, double alpha,
               const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

/// RRS transform for variants rrs_exact, rrs_upper, rrs_lower, rrs_weighted.
double laplace_rrs(const LaplaceModel& model, double s);

/// Exponent of the exact RRS transform: 2 pi lambda int r (sum c_u Ups^u - 1) dr.
double laplace_rrs_exact_exponent(const LaplaceModel& model, double s);

/// CRS transform: crs_weighted is sum_t beta_{t-1} exp(-chi (c1 + c2 t^((alpha-2)/alpha) delta^(2/alpha)) s^(2/alpha));
/// crs_exact_fixed_marks integrates c0 + c1 Ups(s) + c2 Ups(a s) Ups((delta - a) s) - 1.
double laplace_crs(const LaplaceModel& model, double s, double delta);

/// crs_weighted evaluated at complex s on the principal branch of s^(2/alpha).
std::complex<double> laplace_crs_weighted(const LaplaceModel& model, std::complex<double> s, double delta);

/// nu_t = chi (c1 + c2 t^((alpha-2)/alpha) delta^(2/alpha)), t in {1, 2}.
double crs_nu(const LaplaceModel& model, int t, double delta);

/// Dispatches on the variant; delta is ignored by the RRS variants.
double laplace(const LaplaceModel& model, double s, double delta);

}  // namespace aggsched
