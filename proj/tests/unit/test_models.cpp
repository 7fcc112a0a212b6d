#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "models/models.hpp"

using namespace pcrlab;
using models::Matrix;
using models::Vector;

namespace {

Vector axis(int p, int i) {
  Vector e = Vector::Zero(p);
  e[i] = 1.0;
  return e;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

Matrix sample_second_moment(const Matrix& w) { return w.transpose() * w / static_cast<double>(w.rows()); }

}  // namespace

TEST_CASE("spike spec validation") {
  const int p = 5;
  CHECK_NOTHROW(models::SpikeSpec::classical(4.0, axis(p, 0)).validate(p));
  CHECK(code_of([&] { models::SpikeSpec::classical(4.0, axis(p, 0)).validate(p + 1); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([&] { models::SpikeSpec::classical(4.0, 2.0 * axis(p, 0)).validate(p); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([&] { models::SpikeSpec::classical(-3.0, axis(p, 0)).validate(p); }) == ErrorCode::InvalidSpec);
  models::SpikeSpec two;
  two.spikes = {{3.0, axis(p, 0)}, {5.0, axis(p, 1)}};
  CHECK(code_of([&] { two.validate(p); }) == ErrorCode::InvalidSpec);  // not decreasing
  two.spikes = {{5.0, axis(p, 0)}, {3.0, (axis(p, 0) + axis(p, 1)).normalized()}};
  CHECK(code_of([&] { two.validate(p); }) == ErrorCode::InvalidSpec);  // not orthogonal
}

TEST_CASE("covariance and eigenbasis of a spiked spec") {
  const int p = 6;
  const Vector v = Vector::Ones(p).normalized();
  const auto spec = models::SpikeSpec::classical(3.0, v);
  const Matrix s = spec.covariance(p);
  CHECK((s - (Matrix::Identity(p, p) + 3.0 * v * v.transpose())).norm() < 1e-12);
  const Matrix q = spec.eigenbasis(p);
  CHECK((q.transpose() * q - Matrix::Identity(p, p)).norm() < 1e-12);
  CHECK((q.col(0) - v).norm() < 1e-12);
}

TEST_CASE("spiked draws have the population covariance") {
  const int p = 8, n = 200000;
  const Vector v = Vector::Ones(p).normalized();
  const Matrix w = models::gen_spiked(n, p, models::SpikeSpec::classical(4.0, v), 17);
  const Matrix target = models::SpikeSpec::classical(4.0, v).covariance(p);
  CHECK((sample_second_moment(w) - target).cwiseAbs().maxCoeff() < 0.06);
  CHECK((w - models::gen_spiked(n, p, models::SpikeSpec::classical(4.0, v), 17)).norm() == 0.0);
}

TEST_CASE("general bulk draws") {
  const int p = 4, n = 200000;
  models::SpikeSpec spec;
  spec.spikes = {{6.0, axis(p, 2)}};
  spec.bulk = {2.0, 0.5, 1.0};
  const Matrix w = models::gen_spiked(n, p, spec, 3);
  CHECK((sample_second_moment(w) - spec.covariance(p)).cwiseAbs().maxCoeff() < 0.08);
}

TEST_CASE("differentiated count") {
  CHECK(models::differentiated_count(200, 0.0) == 1);
  CHECK(models::differentiated_count(200, 1.0) == 200);
  CHECK(models::differentiated_count(100, 0.5) == 10);  // exactly 10, not 11
  CHECK(models::differentiated_count(1000, 1.0 / 3.0) == 10);
  CHECK(models::differentiated_count(200, 0.5) == 15);
}

TEST_CASE("binomial mixture moments by exact enumeration") {
  models::MixtureSpec spec;
  spec.kind = models::MixtureKind::BinomialTwoGroup;
  spec.m = 3;
  spec.q1 = 0.2;
  spec.q2 = 0.65;
  spec.q_null = 0.4;
  const int p = 6;
  auto binom2 = [](double q) { return std::array<double, 3>{(1 - q) * (1 - q), 2 * q * (1 - q), q * q}; };
  Matrix exact = Matrix::Zero(p, p);
  Vector exact_mean = Vector::Zero(p);
  for (int g = 0; g < 2; ++g) {
    auto q = [&](int j) { return j < spec.m ? (g == 0 ? spec.q1 : spec.q2) : spec.q_null; };
    for (int i = 0; i < p; ++i) {
      const auto pi = binom2(q(i));
      for (int a = 0; a < 3; ++a) exact_mean[i] += 0.5 * pi[a] * a;
      for (int j = 0; j < p; ++j) {
        const auto pj = binom2(q(j));
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            if (i == j && a != b) continue;
            exact(i, j) += 0.5 * (i == j ? pi[a] : pi[a] * pj[b]) * a * b;
          }
      }
    }
  }
  const auto mc = models::mixture_covariance(spec, p);
  CHECK((mc.mean - exact_mean).norm() < 1e-12);
  CHECK((mc.second_moment() - exact).norm() < 1e-12);
  CHECK((mc.covariance() - (exact - exact_mean * exact_mean.transpose())).norm() < 1e-12);
  CHECK(mc.spike_strength == doctest::Approx(3 * 0.45 * 0.45));

  const Matrix w = models::gen_binomial_mixture(200000, p, spec, 5);
  CHECK((sample_second_moment(w) - exact).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("gaussian mixture covariance") {
  models::MixtureSpec spec;
  spec.m = 4;
  spec.shift = 0.7;
  const int p = 7;
  const auto mc = models::mixture_covariance(spec, p);
  Vector ones_s = Vector::Zero(p);
  ones_s.head(4).setOnes();
  CHECK((mc.covariance() - (Matrix::Identity(p, p) + 0.49 * ones_s * ones_s.transpose())).norm() < 1e-12);
  const Matrix w = models::gen_gaussian_mixture(200000, p, spec, 8);
  CHECK((sample_second_moment(w) - mc.second_moment()).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("principal pair of a mixture matches a dense eigensolver") {
  for (bool centered : {false, true})
    for (int m : {1, 5, 12}) {
      CAPTURE(m);
      CAPTURE(centered);
      models::MixtureSpec spec;
      spec.kind = models::MixtureKind::BinomialTwoGroup;
      spec.m = m;
      const int p = 20;
      const auto mc = models::mixture_covariance(spec, p);
      const Matrix target = centered ? mc.covariance() : mc.second_moment();
      Eigen::SelfAdjointEigenSolver<Matrix> es(target);
      const auto pp = models::principal_pair(spec, p, centered);
      CHECK(pp.l1 == doctest::Approx(es.eigenvalues()[p - 1]).epsilon(1e-10));
      CHECK(pp.l2 == doctest::Approx(es.eigenvalues()[p - 2]).epsilon(1e-10));
      CHECK((target * pp.v1 - pp.l1 * pp.v1).norm() < 1e-9);
      CHECK((target * pp.v2 - pp.l2 * pp.v2).norm() < 1e-9);
      CHECK(std::abs(pp.v1.dot(pp.v2)) < 1e-12);
      CHECK(pp.v1.norm() == doctest::Approx(1.0));
    }
}

TEST_CASE("principal pair of a spiked spec") {
  const int p = 10;
  const auto pp = models::principal_pair(models::SpikeSpec::classical(4.0, axis(p, 0)), p);
  CHECK(pp.l1 == doctest::Approx(5.0));
  CHECK(pp.l2 == doctest::Approx(1.0));
  CHECK((pp.v1 - axis(p, 0)).norm() < 1e-12);
  // canonical vector in the degenerate bulk: first usable axis
  CHECK((pp.v2 - axis(p, 1)).norm() < 1e-12);
}

TEST_CASE("angle construction") {
  const int p = 100;
  models::CoefficientContext ctx;
  ctx.directions = models::principal_pair(models::SpikeSpec::classical(4.0, axis(p, 0)), p);
  for (double tau : {0.0, 0.3, 1.0}) {
    const Vector b = models::make_beta(models::CoefficientSpec::angle(tau), ctx, p, 0);
    const double a = 1.0 - std::pow(p, -tau);
    CHECK(b.norm() == doctest::Approx(1.0));
    CHECK(b.dot(ctx.directions->v1) == doctest::Approx(a));
  }
  const Vector inf = models::make_beta(models::CoefficientSpec::angle(INFINITY), ctx, p, 0);
  CHECK((inf - axis(p, 0)).norm() < 1e-15);
  CHECK(code_of([&] { models::make_beta(models::CoefficientSpec::angle(-0.5), ctx, p, 0); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([&] { models::make_beta(models::CoefficientSpec::angle(0.5), {}, p, 0); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("population least squares matches a linear solve") {
  const int p = 30;
  auto e = rng::make_engine(4);
  const Vector v = rng::normal_vector(p + 1, e).normalized();
  const double lambda = 7.0;
  const Matrix s = Matrix::Identity(p + 1, p + 1) + lambda * v * v.transpose();
  const Vector oracle = s.bottomRightCorner(p, p).partialPivLu().solve(s.col(0).tail(p));
  CHECK((models::population_least_squares_single(lambda, v) - oracle).norm() < 1e-12);

  models::CoefficientContext ctx;
  ctx.joint = models::SpikeSpec::classical(lambda, v);
  const Vector b = models::make_beta(models::CoefficientSpec::population_least_squares(), ctx, p, 0);
  CHECK((b - oracle).norm() < 1e-12);

  // two spikes: dense path
  models::SpikeSpec two;
  const Vector u = (rng::normal_vector(p + 1, e) - v * v.dot(rng::normal_vector(p + 1, e))).normalized();
  const Vector u_perp = (u - v * v.dot(u)).normalized();
  two.spikes = {{9.0, v}, {3.0, u_perp}};
  ctx.joint = two;
  const Matrix s2 = two.covariance(p + 1);
  const Vector oracle2 = s2.bottomRightCorner(p, p).partialPivLu().solve(s2.col(0).tail(p));
  CHECK((models::make_beta(models::CoefficientSpec::population_least_squares(), ctx, p, 0) - oracle2).norm() < 1e-10);
}

TEST_CASE("random coefficients have the stated variance") {
  const int p = 100000;
  const Vector g = models::make_beta(models::CoefficientSpec::random(2.0), {}, p, 1);
  CHECK(g.squaredNorm() == doctest::Approx(2.0).epsilon(0.02));
  const Vector r = models::make_beta(models::CoefficientSpec::random(2.0, models::RandomLaw::Rademacher), {}, p, 1);
  CHECK(r.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(models::make_beta(models::CoefficientSpec::zero(5), {}, 5, 1).norm() == 0.0);
}

TEST_CASE("explicit coefficient respects its norm bound") {
  CHECK_NOTHROW(models::make_beta(models::CoefficientSpec::explicit_vector(Vector::Ones(4) * 0.5), {}, 4, 0));
  CHECK(code_of([] { models::make_beta(models::CoefficientSpec::explicit_vector(Vector::Ones(4)), {}, 4, 0); }) ==
        ErrorCode::InvalidSpec);
}

TEST_CASE("exposure and outcome generation") {
  const int n = 50000, p = 3;
  Matrix w = Matrix::Zero(n, p);
  auto e = rng::make_engine(2);
  rng::fill_normal(w, e);
  const Vector theta = Vector::Ones(p) * 0.4;
  const Vector a = models::gen_exposure_linear(w, theta, 0.5, 6);
  CHECK((a - w * theta).squaredNorm() / n == doctest::Approx(0.25).epsilon(0.03));
  const Vector ab = models::gen_exposure_binomial(w, theta, 6);
  CHECK(((ab.array() == 0.0) || (ab.array() == 1.0) || (ab.array() == 2.0)).all());
  CHECK(ab.mean() == doctest::Approx(1.0).epsilon(0.02));

  const Vector beta = Vector::Ones(p);
  const Vector y = models::gen_outcome(a, w, beta, 0.0, 0.0, 1);
  CHECK((y - w * beta).norm() < 1e-12);
  CHECK(code_of([&] { models::gen_outcome(a, w, beta, 0.0, -1.0, 1); }) == ErrorCode::InvalidInput);
}

TEST_CASE("subspace distance") {
  Matrix basis = Matrix::Zero(4, 1);
  basis(0, 0) = 2.0;
  Vector b(4);
  b << 1, 1, 0, 0;
  CHECK(models::subspace_distance(b, basis) == doctest::Approx(0.5));
  CHECK(code_of([&] { models::subspace_distance(Vector::Zero(4), basis); }) == ErrorCode::InvalidInput);
}
