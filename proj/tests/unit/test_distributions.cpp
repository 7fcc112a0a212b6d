#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <cmath>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace pcrlab;

TEST_CASE("chi1 quantile at the usual levels") {
  CHECK(std::abs(dist::chi1_upper_quantile(0.05) - 3.841459) < 1e-5);
  CHECK(std::abs(dist::chi1_upper_quantile(0.05) - 3.841458820694124) < 1e-10);
  for (double a : {1e-8, 1e-4, 0.01, 0.05, 0.1, 0.5, 0.9, 0.999}) {
    CAPTURE(a);
    CHECK(std::abs(dist::chi1_upper_quantile(a) - oracle::chi1_quantile_bisect(a)) < 1e-9);
    const boost::math::chi_squared_distribution<double> chi(1.0);
    CHECK(dist::chi1_upper_quantile(a) == doctest::Approx(boost::math::quantile(boost::math::complement(chi, a))));
  }
}

TEST_CASE("chi1 quantile rejects levels outside (0,1)") {
  for (double a : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    CAPTURE(a);
    CHECK_THROWS_AS(dist::chi1_upper_quantile(a), Error);
  }
}

TEST_CASE("noncentral sf against Simpson quadrature on a 10x10 grid") {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double t = 0.05 + 1.5 * i;
      const double ncp = 0.4 * j * j;
      worst = std::max(worst, std::abs(dist::noncentral_chi1_sf(t, ncp) - oracle::ncx1_sf_quadrature(t, ncp)));
    }
  CHECK(worst < 1e-8);
}

TEST_CASE("noncentral sf agrees with Boost's noncentral chi-square") {
  for (double t : {0.5, 3.841458820694124, 10.0})
    for (double ncp : {0.1, 2.0, 15.0}) {
      const boost::math::non_central_chi_squared_distribution<double> d(1.0, ncp);
      CHECK(dist::noncentral_chi1_sf(t, ncp) == doctest::Approx(boost::math::cdf(boost::math::complement(d, t))).epsilon(1e-9));
    }
}

TEST_CASE("noncentral sf edge behaviour") {
  CHECK(dist::noncentral_chi1_sf(3.841458820694124, 0.0) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(dist::noncentral_chi1_sf(0.0, 5.0) == doctest::Approx(1.0));
  CHECK(dist::noncentral_chi1_sf(1.0, 1e4) == doctest::Approx(1.0));
  CHECK(dist::noncentral_chi1_cdf(2.0, 3.0) + dist::noncentral_chi1_sf(2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  // far tail: cdf form keeps precision where 1 - sf would not
  CHECK(dist::noncentral_chi1_cdf(1e-12, 0.0) > 0.0);
  CHECK_THROWS_AS(dist::noncentral_chi1_sf(-1.0, 1.0), Error);
  CHECK_THROWS_AS(dist::noncentral_chi1_sf(1.0, -1.0), Error);
  CHECK_THROWS_AS(dist::noncentral_chi1_sf(std::nan(""), 1.0), Error);
}

TEST_CASE("sf is nonincreasing in t and nondecreasing in ncp") {
  double prev = 1.0;
  for (double t = 0.0; t < 30.0; t += 0.25) {
    const double s = dist::noncentral_chi1_sf(t, 4.0);
    CHECK(s <= prev + 1e-15);
    prev = s;
  }
  prev = 0.0;
  for (double ncp = 0.0; ncp < 30.0; ncp += 0.25) {
    const double s = dist::noncentral_chi1_sf(3.84, ncp);
    CHECK(s >= prev - 1e-15);
    prev = s;
  }
}
