#pragma once

#include <cmath>

#include "aggsched/errors.hpp"

namespace aggsched {

/// Scenario parameters of the clustered uplink network.
/// Units: lambda_a per m^2, R_a in meters, rho in power units; the rest are dimensionless.
struct NetworkParams {
  double lambda_a = std::pow(10.0, -4.4);
  double R_a = 40.0;
  double alpha = 3.6;
  double m_bar = 60.0;
  int N = 30;
  int L = 2;
  double theta = 1.0;
  double mu = 0.0;
  double rho = 1.0;
  double beta0 = 0.5;
  double beta1 = 0.5;
  double delta = 1.0;

  /// Throws domain_error naming the first violated invariant.
  void validate() const;
};

/// chi = 1/2 lambda_a pi R_a^2 Gamma(1 + 2/alpha) Gamma(1 - 2/alpha).
double chi(const NetworkParams& p);

/// Psi = 2 rho R_a^alpha / (alpha + 2), the mean channel-inversion transmit power.
double mean_inversion_power(const NetworkParams& p);

}  // namespace aggsched
