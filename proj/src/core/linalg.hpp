#pragma once

#include <Eigen/Core>

namespace pcrlab::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct ThinSvd {
  Vector singular_values;  // nonincreasing
  Matrix left;             // n x r
  Matrix right;            // p x r
};

// Full thin SVD, r = min(n, p). Each right vector's largest-magnitude entry is
// made positive (lowest index wins ties); left vectors follow the same flip.
ThinSvd thin_svd(const Matrix& m);

// First k right singular vectors. Requires 1 <= k < min(n, p).
Matrix top_right_vectors(const ThinSvd& svd, Index k);

// Leading k singular triplets only, via Lanczos on the smaller Gram matrix.
// Same sign convention and the same k bound as top_right_vectors.
ThinSvd leading_svd(const Matrix& m, Index k);

// Top-k eigenpairs of a symmetric matrix, eigenvalues nonincreasing.
struct SymEigen {
  Vector values;
  Matrix vectors;
};
SymEigen leading_eigen(const Matrix& sym, Index k);

// (I - P_basis) target, with the column space taken at relative rank 1e-10.
Vector residualize(const Vector& target, const Matrix& basis);

void apply_sign_convention(Matrix& right, Matrix& left);

bool all_finite(const Matrix& m);

}  // namespace pcrlab::linalg
