#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aggsched/occupancy.hpp"

using namespace aggsched;

namespace {

// Explicit Poisson mixture with a deep tail, independent of both library paths.
std::vector<double> brute_force(double m, int N, int L) {
  std::vector<double> c(static_cast<std::size_t>(L) + 1, 0.0);
  const long kcut = static_cast<long>(m + 40.0 * std::sqrt(m + 1.0) + 60.0);
  double pk = std::exp(-m);  // Pr(K = 0)
  for (long k = 0; k <= kcut; ++k) {
    if (k > 0) pk *= m / static_cast<double>(k);
    const auto cond = conditional_occupancy(k, N, L);
    for (int u = 0; u <= L; ++u) c[u] += pk * cond[u];
  }
  return c;
}

}  // namespace

TEST_CASE("conditional occupancy worked example") {
  const auto c = conditional_occupancy(26, 10, 4);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.0);
  CHECK(c[2] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(c[3] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(c[4] == 0.0);
}

TEST_CASE("conditional occupancy saturates at L") {
  const auto c = conditional_occupancy(100, 10, 2);
  CHECK(c[2] == 1.0);
  const auto z = conditional_occupancy(0, 10, 2);
  CHECK(z[0] == 1.0);
}

TEST_CASE("frozen oracle values") {
  const auto a = occupancy_pmf(6.0, 4, 2);
  CHECK(a.c[0] == doctest::Approx(0.05825067615165942).epsilon(1e-12));
  CHECK(a.c[1] == doctest::Approx(0.46200399498522826).epsilon(1e-12));
  CHECK(a.c[2] == doctest::Approx(0.4797453288631121).epsilon(1e-12));
  const auto b = occupancy_pmf(60.0, 30, 2);
  CHECK(b.c[0] == doctest::Approx(4.218133960280495e-07).epsilon(1e-10));
  CHECK(b.c[1] == doctest::Approx(0.1028626463538977).epsilon(1e-12));
  CHECK(b.c[2] == doctest::Approx(0.897136931832685).epsilon(1e-12));
  CHECK(b.c_bar == doctest::Approx(b.c[1] + 2.0 * b.c[2]).epsilon(1e-14));
}

TEST_CASE("closed form equals the Poisson mixture over a parameter grid") {
  double worst = 0.0;
  for (int N = 2; N <= 10; ++N) {
    for (int L = 1; L <= 4; ++L) {
      for (double m = 0.5; m <= 20.0 + 1e-9; m += 0.5) {
        const auto closed = occupancy_pmf(m, N, L);
        const auto mix = occupancy_pmf_mixture(m, N, L);
        const auto ref = brute_force(m, N, L);
        double total = 0.0;
        for (int u = 0; u <= L; ++u) {
          worst = std::max(worst, std::abs(closed.c[u] - ref[u]));
          worst = std::max(worst, std::abs(mix.c[u] - ref[u]));
          CHECK(closed.c[u] >= 0.0);
          CHECK(closed.c[u] <= 1.0);
          total += closed.c[u];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("m_bar = 0 leaves every channel empty") {
  const auto p = occupancy_pmf(0.0, 30, 2);
  CHECK(p.c[0] == 1.0);
  CHECK(p.c[1] == 0.0);
  CHECK(p.c[2] == 0.0);
  CHECK(p.c_bar == 0.0);
}

TEST_CASE("L = 1 reduces to the OMA occupancy") {
  const double m = 12.0;
  const int N = 10;
  const auto p = occupancy_pmf(m, N, 1);
  // E[min(K, N)] / N
  double mean = 0.0;
  for (long k = 0; k < 200; ++k) mean += poisson_pmf(k, m) * static_cast<double>(std::min<long>(k, N));
  CHECK(p.c[1] == doctest::Approx(mean / N).epsilon(1e-12));
}

TEST_CASE("kmax rule") {
  CHECK(kmax_for_tail(30.0, 1e-5) == 56);
  CHECK(kmax_for_tail(60.0, 1e-5) == 96);
  CHECK(kmax_for_tail(0.0, 1e-5) == 0);
  for (double m : {1.0, 7.5, 30.0, 60.0}) {
    const long k = kmax_for_tail(m, 1e-5);
    CHECK(poisson_cdf(k, m) > 1.0 - 1e-5);
    if (k > 0) CHECK(poisson_cdf(k - 1, m) <= 1.0 - 1e-5);
  }
}

TEST_CASE("explicit PMFs are validated") {
  CHECK_NOTHROW(OccupancyPMF::from_probabilities({0.0, 0.0, 1.0}));
  CHECK_THROWS_AS(OccupancyPMF::from_probabilities({0.5, 0.6}), domain_error);
  CHECK_THROWS_AS(OccupancyPMF::from_probabilities({-0.1, 1.1}), domain_error);
  CHECK(OccupancyPMF::from_probabilities({0.2, 0.3, 0.5}).c_bar == doctest::Approx(1.3));
}
