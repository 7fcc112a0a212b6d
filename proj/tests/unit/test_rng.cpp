#include <set>

#include "core/rng.hpp"
#include "doctest.h"

using namespace pcrlab;

TEST_CASE("derived seeds are stable and distinct") {
  CHECK(rng::derive(1, 2) == rng::derive(1, 2));
  CHECK(rng::derive(1, 2) != rng::derive(1, 3));
  CHECK(rng::derive(1, 2) != rng::derive(2, 2));
  CHECK(rng::derive(5, 1, 2) != rng::derive(5, 2, 1));
  CHECK(rng::derive(5, "W") == rng::derive(5, "W"));
  CHECK(rng::derive(5, "W") != rng::derive(5, "eta"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(rng::derive(42, a, b));
  CHECK(seen.size() == 2500);
}

TEST_CASE("seed fault makes derivation irreproducible") {
  rng::set_seed_fault(true);
  const auto a = rng::derive(9, 1), b = rng::derive(9, 1);
  rng::set_seed_fault(false);
  CHECK(a != b);
  CHECK(rng::derive(9, 1) == rng::derive(9, 1));
}

TEST_CASE("normal draws have unit variance and are reproducible") {
  auto e1 = rng::make_engine(123), e2 = rng::make_engine(123);
  const Eigen::VectorXd x = rng::normal_vector(200000, e1);
  CHECK(std::abs(x.mean()) < 0.01);
  CHECK(std::abs(x.squaredNorm() / x.size() - 1.0) < 0.015);
  CHECK((x - rng::normal_vector(200000, e2)).norm() == 0.0);
}

TEST_CASE("uniform01 stays in [0,1)") {
  auto e = rng::make_engine(1);
  double lo = 1, hi = 0, sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng::uniform01(e);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}
