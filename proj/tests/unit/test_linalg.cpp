#include <cmath>

#include "core/errors.hpp"
#include "core/linalg.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace pcrlab;
using linalg::Matrix;
using linalg::Vector;

namespace {

Matrix gaussian(int n, int p, std::uint64_t seed) {
  Matrix m(n, p);
  auto e = rng::make_engine(seed);
  rng::fill_normal(m, e);
  return m;
}

// |<a_j, b_j>| close to 1 for each column
double worst_alignment(const Matrix& a, const Matrix& b) {
  double worst = 1.0;
  for (int j = 0; j < a.cols(); ++j) worst = std::min(worst, std::abs(a.col(j).dot(b.col(j))));
  return worst;
}

}  // namespace

TEST_CASE("thin svd reconstructs and is orthonormal") {
  for (auto [n, p] : {std::pair{30, 12}, {12, 30}}) {
    const Matrix m = gaussian(n, p, 7);
    const auto s = linalg::thin_svd(m);
    const int r = std::min(n, p);
    REQUIRE(s.singular_values.size() == r);
    const Matrix rebuilt = s.left * s.singular_values.asDiagonal() * s.right.transpose();
    CHECK((rebuilt - m).norm() < 1e-10 * m.norm());
    CHECK((s.right.transpose() * s.right - Matrix::Identity(r, r)).norm() < 1e-10);
    for (int j = 1; j < r; ++j) CHECK(s.singular_values[j] <= s.singular_values[j - 1]);
  }
}

TEST_CASE("sign convention: largest entry positive, lowest index on ties") {
  Matrix right(3, 2), left = Matrix::Identity(2, 2);
  right << -0.8, 0.5, 0.6, -0.5, 0.0, 0.7;
  linalg::apply_sign_convention(right, left);
  CHECK(right(0, 0) == doctest::Approx(0.8));
  CHECK(left(0, 0) == doctest::Approx(-1.0));
  CHECK(right(2, 1) == doctest::Approx(0.7));

  Matrix tie(2, 1), l2 = Matrix::Identity(1, 1);
  tie << -std::sqrt(0.5), std::sqrt(0.5);
  linalg::apply_sign_convention(tie, l2);
  CHECK(tie(0, 0) > 0.0);
}

TEST_CASE("top right vectors match a Jacobi SVD oracle and enforce the rank bound") {
  const Matrix m = gaussian(40, 25, 11);
  const auto s = linalg::thin_svd(m);
  const Matrix v = linalg::top_right_vectors(s, 3);
  CHECK(worst_alignment(v, oracle::right_vectors(m, 3)) > 1 - 1e-9);
  CHECK_THROWS_AS(linalg::top_right_vectors(s, 0), Error);
  try {
    linalg::top_right_vectors(s, 25);
    FAIL("expected RankError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankError);
  }
}

TEST_CASE("leading svd agrees with the full decomposition") {
  for (auto [n, p] : {std::pair{60, 150}, {150, 60}, {20, 10}}) {
    CAPTURE(n);
    Matrix m = gaussian(n, p, 3);
    m.col(0) *= 6.0;  // a clear leading direction
    const auto full = linalg::thin_svd(m);
    const auto lead = linalg::leading_svd(m, 2);
    CHECK((lead.singular_values - full.singular_values.head(2)).norm() < 1e-8 * full.singular_values[0]);
    CHECK(worst_alignment(lead.right, full.right.leftCols(2)) > 1 - 1e-8);
    // same sign convention, so vectors agree entrywise
    CHECK((lead.right - full.right.leftCols(2)).norm() < 1e-6);
    CHECK((m * lead.right - lead.left * lead.singular_values.asDiagonal()).norm() < 1e-8 * m.norm());
  }
}

TEST_CASE("leading eigen: Lanczos path against the dense solver") {
  const Matrix g = gaussian(300, 120, 5);
  const Matrix sym = g.transpose() * g;
  const auto lead = linalg::leading_eigen(sym, 3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  for (int j = 0; j < 3; ++j) {
    CHECK(lead.values[j] == doctest::Approx(es.eigenvalues()[119 - j]).epsilon(1e-10));
    CHECK(std::abs(lead.vectors.col(j).dot(es.eigenvectors().col(119 - j))) > 1 - 1e-8);
  }
}

TEST_CASE("leading svd flags numerically rank deficient input") {
  Matrix m = Matrix::Zero(10, 8);
  m.col(0).setOnes();
  CHECK_THROWS_AS(linalg::leading_svd(m, 2), Error);
}

TEST_CASE("residualize removes the column space") {
  const Matrix basis = gaussian(50, 4, 9);
  const Vector t = gaussian(50, 1, 10).col(0);
  const Vector r = linalg::residualize(t, basis);
  CHECK((basis.transpose() * r).norm() < 1e-10);
  // idempotent
  CHECK((linalg::residualize(r, basis) - r).norm() < 1e-10);
  // no columns: identity
  CHECK((linalg::residualize(t, Matrix(50, 0)) - t).norm() == 0.0);
  // duplicated column does not change the projection
  Matrix dup(50, 5);
  dup << basis, basis.col(0);
  CHECK((linalg::residualize(t, dup) - r).norm() < 1e-9);
}

TEST_CASE("non-finite input is rejected") {
  Matrix m = Matrix::Ones(4, 3);
  m(1, 1) = std::nan("");
  CHECK_THROWS_AS(linalg::thin_svd(m), Error);
  CHECK_THROWS_AS(linalg::thin_svd(Matrix(0, 0)), Error);
}
