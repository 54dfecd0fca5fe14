#include "aggsched/params.hpp"

#include <numbers>
#include <string>

namespace aggsched {

void NetworkParams::validate() const {
  auto fail = [](const std::string& what) { throw domain_error("NetworkParams: " + what); };
  if (!(lambda_a > 0.0) || !std::isfinite(lambda_a)) fail("lambda_a must be positive");
  if (!(R_a > 0.0) || !std::isfinite(R_a)) fail("R_a must be positive");
  if (!(alpha > 2.0) || !std::isfinite(alpha)) fail("alpha must exceed 2");
  if (!(m_bar >= 0.0) || !std::isfinite(m_bar)) fail("m_bar must be non-negative");
  if (N < 1) fail("N must be >= 1");
  if (L < 1) fail("L must be >= 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) fail("theta must be positive");
  if (!(mu >= 0.0 && mu <= 1.0)) fail("mu must lie in [0, 1]");
  if (!(rho > 0.0) || !std::isfinite(rho)) fail("rho must be positive");
  if (!(beta0 >= 0.0 && beta0 <= 1.0) || !(beta1 >= 0.0 && beta1 <= 1.0)) fail("beta0, beta1 must lie in [0, 1]");
  if (std::abs(beta0 + beta1 - 1.0) > 1e-12) fail("beta0 + beta1 must equal 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) fail("delta must be positive");
}

double chi(const NetworkParams& p) {
  if (!(p.alpha > 2.0)) throw domain_error("chi: alpha must exceed 2");
  const double r = 2.0 / p.alpha;
  return 0.5 * p.lambda_a * std::numbers::pi * p.R_a * p.R_a * std::tgamma(1.0 + r) * std::tgamma(1.0 - r);
}

double mean_inversion_power(const NetworkParams& p) {
  return 2.0 * p.rho * std::pow(p.R_a, p.alpha) / (p.alpha + 2.0);
}

}  // namespace aggsched
