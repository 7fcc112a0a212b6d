#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "core/errors.hpp"

namespace pcrlab::linalg {
namespace {

constexpr double kRankTol = 1e-10;
constexpr Index kDenseLimit = 64;

void check_rank_request(Index k, Index n, Index p) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be at least 1");
  if (k >= std::min(n, p))
    throw Error(ErrorCode::RankError,
                "k=" + std::to_string(k) + " must be below min(n,p)=" +
                    std::to_string(std::min(n, p)));
}

SymEigen dense_top(const Matrix& sym, Index k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Index m = sym.rows();
  SymEigen out{Vector(k), Matrix(m, k)};
  for (Index j = 0; j < k; ++j) {
    out.values[j] = es.eigenvalues()[m - 1 - j];
    out.vectors.col(j) = es.eigenvectors().col(m - 1 - j);
  }
  return out;
}

// Lanczos with full reorthogonalization. The start vector is drawn from a
// fixed-seed generator so results never depend on call history.
SymEigen lanczos_top(const Matrix& sym, Index k) {
  const Index m = sym.rows();
  Matrix q(m, m);
  std::vector<double> alpha, beta;  // beta[j] couples q_j and q_{j+1}
  std::mt19937_64 gen(0x5eed1a2c05ULL);
  std::normal_distribution<double> normal;

  auto fresh_direction = [&](Index j) {
    // random vector orthogonalized against the first j basis vectors
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector r(m);
      for (Index i = 0; i < m; ++i) r[i] = normal(gen);
      for (int pass = 0; pass < 2; ++pass)
        if (j > 0) r -= q.leftCols(j) * (q.leftCols(j).transpose() * r);
      const double nr = r.norm();
      if (nr > 1e-8) return Vector(r / nr);
    }
    throw Error(ErrorCode::RankError, "Lanczos could not extend the Krylov basis");
  };

  q.col(0) = fresh_direction(0);
  const double scale_hint = sym.diagonal().cwiseAbs().maxCoeff();
  Index j = 0;
  SymEigen out{Vector(k), Matrix(m, k)};
  while (true) {
    Vector w = sym * q.col(j);
    const double a = q.col(j).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
    double b = w.norm();
    const Index dim = j + 1;
    bool exhausted = dim == m;

    if (dim >= k && (dim % 4 == 0 || exhausted || dim == k)) {
      Vector diag = Eigen::Map<Vector>(alpha.data(), dim);
      Vector sub = dim > 1 ? Vector(Eigen::Map<Vector>(beta.data(), dim - 1)) : Vector();
      Eigen::SelfAdjointEigenSolver<Matrix> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double top = std::max(std::abs(tri.eigenvalues()[dim - 1]), scale_hint * 1e-300);
      bool converged = true;
      for (Index i = 0; i < k && !exhausted; ++i) {
        const double resid = std::abs(b * tri.eigenvectors()(dim - 1, dim - 1 - i));
        if (resid > 1e-11 * top) converged = false;
      }
      if (converged || exhausted) {
        for (Index i = 0; i < k; ++i) {
          out.values[i] = tri.eigenvalues()[dim - 1 - i];
          Vector y = q.leftCols(dim) * tri.eigenvectors().col(dim - 1 - i);
          out.vectors.col(i) = y / y.norm();
        }
        return out;
      }
    }

    if (b <= 1e-12 * std::max(scale_hint, std::abs(a))) {
      // invariant subspace: restart in the orthogonal complement, uncoupled
      b = 0.0;
      q.col(j + 1) = fresh_direction(j + 1);
    } else {
      q.col(j + 1) = w / b;
    }
    beta.push_back(b);
    ++j;
  }
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

void apply_sign_convention(Matrix& right, Matrix& left) {
  for (Index j = 0; j < right.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < right.rows(); ++i) {
      const double a = std::abs(right(i, j));
      if (a > best_abs) {  // strict: lowest index wins ties
        best_abs = a;
        best = i;
      }
    }
    if (right(best, j) < 0.0) {
      right.col(j) *= -1.0;
      if (j < left.cols()) left.col(j) *= -1.0;
    }
  }
}

ThinSvd thin_svd(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) throw Error(ErrorCode::InvalidInput, "empty matrix");
  if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.singularValues(), svd.matrixU(), svd.matrixV()};
  apply_sign_convention(out.right, out.left);
  return out;
}

Matrix top_right_vectors(const ThinSvd& svd, Index k) {
  check_rank_request(k, svd.left.rows(), svd.right.rows());
  if (k > svd.right.cols()) throw Error(ErrorCode::RankError, "k exceeds available vectors");
  return svd.right.leftCols(k);
}

SymEigen leading_eigen(const Matrix& sym, Index k) {
  if (sym.rows() != sym.cols()) throw Error(ErrorCode::InvalidInput, "matrix not square");
  if (k < 1 || k > sym.rows()) throw Error(ErrorCode::InvalidInput, "bad eigenpair count");
  if (sym.rows() <= kDenseLimit) return dense_top(sym, k);
  return lanczos_top(sym, k);
}

ThinSvd leading_svd(const Matrix& m, Index k) {
  const Index n = m.rows(), p = m.cols();
  if (n < 1 || p < 1) throw Error(ErrorCode::InvalidInput, "empty matrix");
  check_rank_request(k, n, p);
  if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");

  const bool wide = n <= p;
  const Index dim = wide ? n : p;
  Matrix gram = Matrix::Zero(dim, dim);
  if (wide)
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
  else
    gram.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  SymEigen eig = leading_eigen(gram, k);
  ThinSvd out{Vector(k), Matrix(n, k), Matrix(p, k)};
  const double d_top = std::sqrt(std::max(eig.values[0], 0.0));
  for (Index j = 0; j < k; ++j) {
    const double d = std::sqrt(std::max(eig.values[j], 0.0));
    if (d <= kRankTol * d_top || d == 0.0)
      throw Error(ErrorCode::RankError, "matrix rank is below the requested k");
    out.singular_values[j] = d;
    if (wide) {
      out.left.col(j) = eig.vectors.col(j);
      out.right.col(j) = m.transpose() * eig.vectors.col(j) / d;
    } else {
      out.right.col(j) = eig.vectors.col(j);
      out.left.col(j) = m * eig.vectors.col(j) / d;
    }
  }
  apply_sign_convention(out.right, out.left);
  return out;
}

Vector residualize(const Vector& target, const Matrix& basis) {
  if (basis.cols() == 0) return target;
  if (basis.rows() != target.size())
    throw Error(ErrorCode::InvalidInput, "basis and target dimensions differ");
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  if (s.size() > 0 && s[0] > 0.0)
    while (rank < s.size() && s[rank] > kRankTol * s[0]) ++rank;
  if (rank == 0) return target;
  const auto u = svd.matrixU().leftCols(rank);
  return target - u * (u.transpose() * target);
}

}  // namespace pcrlab::linalg
