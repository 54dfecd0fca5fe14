#include <doctest.h>

#include <cmath>
#include <complex>

#include "aggsched/laplace.hpp"

using namespace aggsched;

namespace {

NetworkParams fig2(double alpha) {
  NetworkParams p;
  p.alpha = alpha;
  return p;
}

const OccupancyPMF kPairs = OccupancyPMF::from_probabilities({0.0, 0.0, 1.0});

}  // namespace

TEST_CASE("single-cluster transform against tensor-grid oracles") {
  CHECK(upsilon(100.0, 1.0, 40.0, 3.6) == doctest::Approx(0.9814782228820219).epsilon(2e-6));
  CHECK(upsilon_complement(100.0, 1.0, 40.0, 3.6) == doctest::Approx(0.018521783134004405).epsilon(1e-6));
  CHECK(upsilon_complement(20.0, 5.0, 40.0, 3.6) == doctest::Approx(0.6513483953421063).epsilon(1e-6));
  // Far away the cluster looks like a point: 1 - Ups -> s R^alpha E[r^alpha] / r_w^alpha.
  const double rw = 1e5;
  const double far = 1.0 * 2.0 * std::pow(40.0, 3.6) / 5.6 * std::pow(rw, -3.6);
  CHECK(upsilon_complement(rw, 1.0, 40.0, 3.6) == doctest::Approx(far).epsilon(1e-3));
}

TEST_CASE("exact RRS transform against the independent oracle") {
  struct Case {
    double alpha, value;
  };
  for (const Case c : {Case{3.0, 0.6424778823626064}, Case{3.6, 0.7272478383269244}, Case{5.0, 0.79117861084292}}) {
    const auto m = LaplaceModel::make(LaplaceVariant::rrs_exact, fig2(c.alpha), kPairs);
    CHECK(laplace_rrs(m, 1.0) == doctest::Approx(c.value).epsilon(1e-6));
  }
  const auto single = LaplaceModel::make(LaplaceVariant::rrs_exact, fig2(3.6),
                                         OccupancyPMF::from_probabilities({0.0, 1.0, 0.0}));
  CHECK(laplace_rrs(single, 1.0) == doctest::Approx(0.8375089865782497).epsilon(1e-6));
}

TEST_CASE("one device per channel is the Poisson-field transform") {
  const NetworkParams p = fig2(3.6);
  const auto single = OccupancyPMF::from_probabilities({0.0, 1.0, 0.0});
  for (double s : {0.1, 1.0, 10.0}) {
    const double ppp = std::exp(-chi(p) * std::pow(s, 2.0 / 3.6));
    CHECK(laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_exact, p, single), s) == doctest::Approx(ppp).epsilon(1e-6));
    CHECK(laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_upper, p, single), s) == doctest::Approx(ppp).epsilon(1e-14));
    CHECK(laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_lower, p, single), s) == doctest::Approx(ppp).epsilon(1e-14));
  }
}

TEST_CASE("bounds bracket the exact transform") {
  for (double alpha : {3.0, 3.6, 5.0}) {
    const NetworkParams p = fig2(alpha);
    for (double s : {0.01, 0.1, 1.0}) {
      const double up = laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_upper, p, kPairs), s);
      const double lo = laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_lower, p, kPairs), s);
      const double ex = laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_exact, p, kPairs), s);
      const double w = laplace_rrs(LaplaceModel::make(LaplaceVariant::rrs_weighted, p, kPairs), s);
      CHECK(lo <= ex);
      CHECK(ex <= up);
      CHECK(w == doctest::Approx(0.5 * (up + lo)).epsilon(1e-14));
    }
  }
}

TEST_CASE("transforms are decreasing in s and equal 1 at s = 0") {
  const NetworkParams p = fig2(3.6);
  const OccupancyPMF pmf = occupancy_pmf(p);
  for (auto v : {LaplaceVariant::rrs_exact, LaplaceVariant::rrs_upper, LaplaceVariant::rrs_lower,
                 LaplaceVariant::rrs_weighted, LaplaceVariant::crs_weighted}) {
    const auto m = LaplaceModel::make(v, p, pmf);
    CHECK(laplace(m, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    double prev = 1.0;
    for (double s = 0.05; s < 50.0; s *= 2.3) {
      const double cur = laplace(m, s, 1.0);
      CHECK(cur < prev);
      CHECK(cur > 0.0);
      prev = cur;
    }
  }
}

TEST_CASE("CRS weighted form at delta = 2 collapses to the RRS approximation") {
  for (double alpha : {3.0, 3.6, 5.0}) {
    const NetworkParams p = fig2(alpha);
    const OccupancyPMF pmf = occupancy_pmf(p);
    const auto crs = LaplaceModel::make(LaplaceVariant::crs_weighted, p, pmf);
    const auto rrs = LaplaceModel::make(LaplaceVariant::rrs_weighted, p, pmf);
    for (int db = -20; db <= 20; ++db) {
      const double s = std::pow(10.0, db / 10.0);
      CHECK(laplace_crs(crs, s, 2.0) == doctest::Approx(laplace_rrs(rrs, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("complex CRS transform agrees with the real one on the real axis") {
  const NetworkParams p = fig2(3.6);
  const auto m = LaplaceModel::make(LaplaceVariant::crs_weighted, p);
  for (double s : {0.2, 1.0, 4.0}) {
    const auto z = laplace_crs_weighted(m, {s, 0.0}, 0.74);
    CHECK(z.real() == doctest::Approx(laplace_crs(m, s, 0.74)).epsilon(1e-13));
    CHECK(std::abs(z.imag()) < 1e-15);
  }
  // Characteristic function: |L(-i w)| <= 1.
  for (double w : {0.1, 1.0, 10.0, 100.0}) CHECK(std::abs(laplace_crs_weighted(m, {0.0, -w}, 0.74)) <= 1.0);
}

TEST_CASE("fixed-mark reference needs an explicit opt-in and sits between the weighted bounds") {
  NetworkParams p = fig2(3.6);
  auto exact = LaplaceModel::make(LaplaceVariant::crs_exact_fixed_marks, p, kPairs);
  CHECK_THROWS_AS(laplace_crs(exact, 1.0, 1.0), domain_error);
  exact.reference = true;
  exact.fixed_a = 0.3;
  NetworkParams up = p;
  up.beta0 = 1.0;
  up.beta1 = 0.0;
  NetworkParams lo = p;
  lo.beta0 = 0.0;
  lo.beta1 = 1.0;
  for (double s : {0.1, 1.0}) {
    const double e = laplace_crs(exact, s, 1.0);
    CHECK(e <= laplace_crs(LaplaceModel::make(LaplaceVariant::crs_weighted, up, kPairs), s, 1.0));
    CHECK(e >= laplace_crs(LaplaceModel::make(LaplaceVariant::crs_weighted, lo, kPairs), s, 1.0));
  }
}

TEST_CASE("variant names round-trip") {
  for (auto v : {LaplaceVariant::rrs_exact, LaplaceVariant::rrs_upper, LaplaceVariant::rrs_lower,
                 LaplaceVariant::rrs_weighted, LaplaceVariant::crs_weighted, LaplaceVariant::crs_exact_fixed_marks}) {
    CHECK(laplace_variant_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(laplace_variant_from_string("nope"), domain_error);
}
