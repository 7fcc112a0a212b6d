#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/linalg.hpp"

namespace pcrlab::models {

using linalg::Index;
using linalg::Matrix;
using linalg::Vector;

// Population covariance sum_j l_j v_j v_j^T + (bulk on the orthogonal
// complement). `eigenvalue` is the covariance eigenvalue l_j, so the
// classical I + lambda v v^T has l = 1 + lambda.
struct Spike {
  double eigenvalue;
  Vector direction;
};

struct SpikeSpec {
  std::vector<Spike> spikes;
  // Non-spike eigenvalues in completion order; empty means a unit bulk.
  std::vector<double> bulk;

  static SpikeSpec classical(double lambda, const Vector& direction);
  static SpikeSpec unit(Index p);  // no spikes

  void validate(Index p) const;
  Matrix covariance(Index p) const;
  // Orthonormal p x p basis: spike directions first, then the completion
  // obtained from e_1, e_2, ... by Gram-Schmidt.
  Matrix eigenbasis(Index p) const;
};

Matrix gen_spiked(Index n, Index p, const SpikeSpec& spec, std::uint64_t seed);

enum class MixtureKind { GaussianMeanShift, BinomialTwoGroup };

struct MixtureSpec {
  MixtureKind kind = MixtureKind::GaussianMeanShift;
  Index m = 0;  // differentiated coordinates are 0..m-1
  double shift = 1.0;
  double q1 = 0.3, q2 = 0.7, q_null = 0.5;

  void validate(Index p) const;
};

// ceil(p^tau0), guarded against p^tau0 landing a hair above an integer.
Index differentiated_count(Index p, double tau0);

Matrix gen_gaussian_mixture(Index n, Index p, const MixtureSpec& spec, std::uint64_t seed);
Matrix gen_binomial_mixture(Index n, Index p, const MixtureSpec& spec, std::uint64_t seed);
Matrix gen_mixture(Index n, Index p, const MixtureSpec& spec, std::uint64_t seed);

// Exact population moments of a mixture:
//   Var(W)   = diag(diagonal) + spike_strength * v v^T
//   E WW^T   = Var(W) + mean mean^T
// sigma2 is the diagonal value off the differentiated block.
struct MixtureCovariance {
  Vector mean;
  Vector diagonal;
  double sigma2 = 0.0;
  double spike_strength = 0.0;
  Vector direction;

  Matrix covariance() const;
  Matrix second_moment() const;
};

MixtureCovariance mixture_covariance(const MixtureSpec& spec, Index p);

// Leading two eigenvectors of the population second moment E(W^T W / n).
// Inside a degenerate eigenspace the vector is the normalized projection of
// the first coordinate axis with a nonzero projection.
struct PrincipalPair {
  Vector v1, v2;
  double l1 = 0.0, l2 = 0.0;
};
PrincipalPair principal_pair(const SpikeSpec& spec, Index p);
PrincipalPair principal_pair(const MixtureSpec& spec, Index p, bool centered = false);

Vector gen_exposure_linear(const Matrix& w, const Vector& theta, double sigma_g, std::uint64_t seed);
// Genotype-style exposure: A_i ~ Binomial(2, logistic(w_i . theta)).
Vector gen_exposure_binomial(const Matrix& w, const Vector& theta, std::uint64_t seed);

enum class CoefMode { Fixed, Random };
enum class FixedKind { AngleToSpike, ExplicitVector, PopulationLeastSquares };
enum class RandomLaw { Gaussian, Rademacher };

struct CoefficientSpec {
  CoefMode mode = CoefMode::Random;
  FixedKind fixed_kind = FixedKind::AngleToSpike;
  double tau0 = 0.0;  // AngleToSpike: a = 1 - p^{-tau0}; +inf gives v1
  Vector vector;      // ExplicitVector
  double norm_bound = 1.0;
  double variance = 1.0;  // Random: coordinates have variance variance/p
  RandomLaw law = RandomLaw::Gaussian;

  static CoefficientSpec angle(double tau0);
  static CoefficientSpec explicit_vector(Vector v, double bound = 1.0);
  static CoefficientSpec population_least_squares();
  static CoefficientSpec random(double variance, RandomLaw law = RandomLaw::Gaussian);
  static CoefficientSpec zero(Index p);
};

// What make_beta may need: the two leading population directions for the
// angle construction, or the (p+1)-dimensional covariance of X = [A : W].
struct CoefficientContext {
  std::optional<PrincipalPair> directions;
  std::optional<SpikeSpec> joint;  // over p+1 coordinates, A first
};

Vector make_beta(const CoefficientSpec& spec, const CoefficientContext& ctx, Index p,
                 std::uint64_t seed);

// Sherman-Morrison form of Sigma22^{-1} Sigma21 for Sigma = I + lambda v v^T.
Vector population_least_squares_single(double lambda, const Vector& v);

Vector gen_outcome(const Vector& a, const Matrix& w, const Vector& beta, double delta,
                   double sigma_y, std::uint64_t seed);

// 1 - |P_V beta|^2 / |beta|^2
double subspace_distance(const Vector& beta, const Matrix& basis);

struct Dataset {
  Matrix w;  // n x p, or X = [A : W] for the in-regression variant
  Vector a, y;
  double delta = 0.0;
  Vector beta;
  std::optional<Vector> theta;
  std::uint64_t seed = 0;
};

}  // namespace pcrlab::models
