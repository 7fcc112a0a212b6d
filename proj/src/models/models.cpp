#include "models/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace pcrlab::models {
namespace {

constexpr double kOrthoTol = 1e-10;

[[noreturn]] void invalid_spec(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

// One eigenspace of a structured population matrix: its eigenvalue and the
// orthogonal projector onto it.
struct Eigenspace {
  double value;
  Index dim;
  std::function<Vector(const Vector&)> project;
};

Vector axis(Index p, Index i) {
  Vector e = Vector::Zero(p);
  e[i] = 1.0;
  return e;
}

// Normalized projection of the first usable coordinate axis onto the span of
// `group`, after removing `exclude` (may be empty).
Vector canonical_vector(const std::vector<const Eigenspace*>& group, const Vector& exclude, Index p) {
  for (Index i = 0; i < p; ++i) {
    const Vector e = axis(p, i);
    Vector x = Vector::Zero(p);
    for (const Eigenspace* s : group) x += s->project(e);
    if (exclude.size() == p) x -= exclude * exclude.dot(x);
    const double nx = x.norm();
    if (nx > 1e-8) return x / nx;
  }
  invalid_spec("eigenspace has no usable direction");
}

PrincipalPair pick_pair(std::vector<Eigenspace> spaces, Index p) {
  spaces.erase(std::remove_if(spaces.begin(), spaces.end(), [](const Eigenspace& s) { return s.dim <= 0; }),
               spaces.end());
  std::stable_sort(spaces.begin(), spaces.end(),
                   [](const Eigenspace& a, const Eigenspace& b) { return a.value > b.value; });
  if (spaces.empty()) invalid_spec("no eigenspaces");
  double scale = 0.0;
  for (const auto& s : spaces) scale = std::max(scale, std::abs(s.value));
  const double tie = 1e-9 * std::max(scale, 1.0);

  // group equal eigenvalues
  std::vector<std::vector<const Eigenspace*>> groups;
  std::vector<double> values;
  std::vector<Index> dims;
  for (const auto& s : spaces) {
    if (!groups.empty() && std::abs(values.back() - s.value) <= tie) {
      groups.back().push_back(&s);
      dims.back() += s.dim;
    } else {
      groups.push_back({&s});
      values.push_back(s.value);
      dims.push_back(s.dim);
    }
  }
  PrincipalPair out;
  out.l1 = values[0];
  out.v1 = canonical_vector(groups[0], Vector(), p);
  if (dims[0] >= 2) {
    out.l2 = values[0];
    out.v2 = canonical_vector(groups[0], out.v1, p);
  } else {
    if (groups.size() < 2) invalid_spec("fewer than two population directions");
    out.l2 = values[1];
    out.v2 = canonical_vector(groups[1], Vector(), p);
  }
  return out;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

SpikeSpec SpikeSpec::classical(double lambda, const Vector& direction) {
  SpikeSpec s;
  s.spikes.push_back({1.0 + lambda, direction});
  return s;
}

SpikeSpec SpikeSpec::unit(Index) { return SpikeSpec{}; }

void SpikeSpec::validate(Index p) const {
  for (std::size_t j = 0; j < spikes.size(); ++j) {
    const auto& s = spikes[j];
    if (s.direction.size() != p) invalid_spec("spike direction has wrong length");
    if (!(s.eigenvalue > 0.0) || !std::isfinite(s.eigenvalue)) invalid_spec("spike eigenvalue must be positive");
    if (j > 0 && !(s.eigenvalue < spikes[j - 1].eigenvalue)) invalid_spec("spike eigenvalues must be strictly decreasing");
    for (std::size_t i = 0; i <= j; ++i) {
      const double ip = spikes[i].direction.dot(s.direction);
      if (std::abs(ip - (i == j ? 1.0 : 0.0)) > kOrthoTol) invalid_spec("spike directions are not orthonormal");
    }
  }
  if (!bulk.empty()) {
    if (static_cast<Index>(bulk.size() + spikes.size()) != p) invalid_spec("explicit bulk has wrong length");
    for (double b : bulk)
      if (!(b > 0.0) || !std::isfinite(b)) invalid_spec("bulk eigenvalues must be positive");
  }
}

Matrix SpikeSpec::eigenbasis(Index p) const {
  validate(p);
  Matrix q(p, p);
  Index cols = 0;
  for (const auto& s : spikes) q.col(cols++) = s.direction;
  for (Index i = 0; i < p && cols < p; ++i) {
    Vector x = axis(p, i);
    for (int pass = 0; pass < 2; ++pass)
      if (cols > 0) x -= q.leftCols(cols) * (q.leftCols(cols).transpose() * x);
    const double nx = x.norm();
    if (nx > 1e-6) q.col(cols++) = x / nx;
  }
  return q;
}

Matrix SpikeSpec::covariance(Index p) const {
  validate(p);
  if (bulk.empty()) {
    Matrix s = Matrix::Identity(p, p);
    for (const auto& sp : spikes) s += (sp.eigenvalue - 1.0) * sp.direction * sp.direction.transpose();
    return s;
  }
  const Matrix q = eigenbasis(p);
  Vector d(p);
  for (std::size_t j = 0; j < spikes.size(); ++j) d[j] = spikes[j].eigenvalue;
  for (std::size_t j = 0; j < bulk.size(); ++j) d[spikes.size() + j] = bulk[j];
  return q * d.asDiagonal() * q.transpose();
}

Matrix gen_spiked(Index n, Index p, const SpikeSpec& spec, std::uint64_t seed) {
  if (n < 1 || p < 1) throw Error(ErrorCode::InvalidInput, "n and p must be positive");
  spec.validate(p);
  auto engine = rng::make_engine(seed);
  Matrix z(n, p);
  rng::fill_normal(z, engine);
  if (spec.bulk.empty()) {
    // Sigma^{1/2} = I + sum (sqrt(l) - 1) v v^T; the updates commute since the v are orthonormal
    for (const auto& s : spec.spikes) {
      const Vector zv = z * s.direction;
      z.noalias() += (std::sqrt(s.eigenvalue) - 1.0) * zv * s.direction.transpose();
    }
    return z;
  }
  const Matrix q = spec.eigenbasis(p);
  Vector root(p);
  for (std::size_t j = 0; j < spec.spikes.size(); ++j) root[j] = std::sqrt(spec.spikes[j].eigenvalue);
  for (std::size_t j = 0; j < spec.bulk.size(); ++j) root[spec.spikes.size() + j] = std::sqrt(spec.bulk[j]);
  return z * (q * root.asDiagonal() * q.transpose());
}

void MixtureSpec::validate(Index p) const {
  if (m < 0 || m > p) invalid_spec("differentiated count must lie in [0, p]");
  auto prob = [](double q) { return q > 0.0 && q < 1.0; };
  if (kind == MixtureKind::BinomialTwoGroup && !(prob(q1) && prob(q2) && prob(q_null)))
    invalid_spec("mixture probabilities must lie in (0,1)");
  if (!std::isfinite(shift)) invalid_spec("mean shift must be finite");
}

Index differentiated_count(Index p, double tau0) {
  const double x = std::pow(static_cast<double>(p), tau0);
  const auto m = static_cast<Index>(std::ceil(x * (1.0 - 1e-12)));
  return std::clamp<Index>(m, 0, p);
}

Matrix gen_gaussian_mixture(Index n, Index p, const MixtureSpec& spec, std::uint64_t seed) {
  if (spec.kind != MixtureKind::GaussianMeanShift) invalid_spec("expected a Gaussian mean-shift mixture");
  spec.validate(p);
  auto labels = rng::make_engine(rng::derive(seed, "label"));
  auto entries = rng::make_engine(rng::derive(seed, "entries"));
  Matrix w(n, p);
  rng::fill_normal(w, entries);
  for (Index i = 0; i < n; ++i) {
    const double s = rng::uniform01(labels) < 0.5 ? spec.shift : -spec.shift;
    w.row(i).head(spec.m).array() += s;
  }
  return w;
}

Matrix gen_binomial_mixture(Index n, Index p, const MixtureSpec& spec, std::uint64_t seed) {
  if (spec.kind != MixtureKind::BinomialTwoGroup) invalid_spec("expected a binomial two-group mixture");
  spec.validate(p);
  auto labels = rng::make_engine(rng::derive(seed, "label"));
  auto entries = rng::make_engine(rng::derive(seed, "entries"));
  std::vector<bool> first(n);
  for (Index i = 0; i < n; ++i) first[i] = rng::uniform01(labels) < 0.5;
  Matrix w(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double q = j < spec.m ? (first[i] ? spec.q1 : spec.q2) : spec.q_null;
      const double u1 = rng::uniform01(entries), u2 = rng::uniform01(entries);
      w(i, j) = static_cast<double>((u1 < q) + (u2 < q));
    }
  }
  return w;
}

Matrix gen_mixture(Index n, Index p, const MixtureSpec& spec, std::uint64_t seed) {
  return spec.kind == MixtureKind::GaussianMeanShift ? gen_gaussian_mixture(n, p, spec, seed)
                                                     : gen_binomial_mixture(n, p, spec, seed);
}

Matrix MixtureCovariance::covariance() const {
  Matrix c = diagonal.asDiagonal();
  c += spike_strength * direction * direction.transpose();
  return c;
}

Matrix MixtureCovariance::second_moment() const { return covariance() + mean * mean.transpose(); }

MixtureCovariance mixture_covariance(const MixtureSpec& spec, Index p) {
  spec.validate(p);
  const Index m = spec.m;
  MixtureCovariance out;
  out.direction = m > 0 ? Vector(Vector::Zero(p)) : axis(p, 0);
  if (m > 0) out.direction.head(m).setConstant(1.0 / std::sqrt(static_cast<double>(m)));
  out.mean = Vector::Zero(p);
  out.diagonal = Vector::Ones(p);
  // two equally weighted groups: Var = mean within-group variance + (mu1 - mu2)(mu1 - mu2)^T / 4
  if (spec.kind == MixtureKind::GaussianMeanShift) {
    out.sigma2 = 1.0;
    out.spike_strength = spec.shift * spec.shift * static_cast<double>(m);
  } else {
    const double v_s = spec.q1 * (1 - spec.q1) + spec.q2 * (1 - spec.q2);  // (2q1(1-q1) + 2q2(1-q2)) / 2
    const double v_null = 2 * spec.q_null * (1 - spec.q_null);
    out.sigma2 = v_null;
    out.diagonal.setConstant(v_null);
    out.diagonal.head(m).setConstant(v_s);
    out.mean.setConstant(2 * spec.q_null);
    out.mean.head(m).setConstant(spec.q1 + spec.q2);
    const double dq = spec.q1 - spec.q2;
    out.spike_strength = dq * dq * static_cast<double>(m);
  }
  return out;
}

PrincipalPair principal_pair(const SpikeSpec& spec, Index p) {
  spec.validate(p);
  std::vector<Eigenspace> spaces;
  Matrix v(p, static_cast<Index>(spec.spikes.size()));
  for (std::size_t j = 0; j < spec.spikes.size(); ++j) {
    const Vector d = spec.spikes[j].direction;
    v.col(static_cast<Index>(j)) = d;
    spaces.push_back({spec.spikes[j].eigenvalue, 1, [d](const Vector& x) { return Vector(d * d.dot(x)); }});
  }
  if (spec.bulk.empty()) {
    spaces.push_back({1.0, p - v.cols(), [v](const Vector& x) { return Vector(x - v * (v.transpose() * x)); }});
  } else {
    const Matrix q = spec.eigenbasis(p);
    for (std::size_t j = 0; j < spec.bulk.size(); ++j) {
      const Vector d = q.col(static_cast<Index>(spec.spikes.size() + j));
      spaces.push_back({spec.bulk[j], 1, [d](const Vector& x) { return Vector(d * d.dot(x)); }});
    }
  }
  return pick_pair(std::move(spaces), p);
}

PrincipalPair principal_pair(const MixtureSpec& spec, Index p, bool centered) {
  const MixtureCovariance mc = mixture_covariance(spec, p);
  const Index m = spec.m;
  const double d_s = m > 0 ? mc.diagonal[0] : 0.0;
  const double d_c = m < p ? mc.diagonal[p - 1] : 0.0;
  const double mu_s = m > 0 ? mc.mean[0] : 0.0;
  const double mu_c = m < p ? mc.mean[p - 1] : 0.0;

  // The matrix acts on span{1_S, 1_S^c} as a 2x2 block and as a multiple of
  // the identity inside each block's mean-zero subspace.
  std::vector<Vector> basis;
  std::vector<double> diag, coef;
  if (m > 0) {
    Vector e = Vector::Zero(p);
    e.head(m).setConstant(1.0 / std::sqrt(static_cast<double>(m)));
    basis.push_back(e);
    diag.push_back(d_s + mc.spike_strength);
    coef.push_back(mu_s * std::sqrt(static_cast<double>(m)));
  }
  if (m < p) {
    Vector e = Vector::Zero(p);
    e.tail(p - m).setConstant(1.0 / std::sqrt(static_cast<double>(p - m)));
    basis.push_back(e);
    diag.push_back(d_c);
    coef.push_back(mu_c * std::sqrt(static_cast<double>(p - m)));
  }
  const auto b = static_cast<Index>(basis.size());
  Matrix block = Matrix::Zero(b, b);
  for (Index i = 0; i < b; ++i) {
    block(i, i) = diag[i];
    if (!centered)
      for (Index j = 0; j < b; ++j) block(i, j) += coef[i] * coef[j];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  std::vector<Eigenspace> spaces;
  for (Index i = 0; i < b; ++i) {
    Vector d = Vector::Zero(p);
    for (Index j = 0; j < b; ++j) d += es.eigenvectors()(j, i) * basis[j];
    spaces.push_back({es.eigenvalues()[i], 1, [d](const Vector& x) { return Vector(d * d.dot(x)); }});
  }
  spaces.push_back({d_s, m - 1, [m](const Vector& x) {
                      Vector y = Vector::Zero(x.size());
                      y.head(m) = x.head(m).array() - x.head(m).mean();
                      return y;
                    }});
  spaces.push_back({d_c, p - m - 1, [m, p](const Vector& x) {
                      Vector y = Vector::Zero(x.size());
                      y.tail(p - m) = x.tail(p - m).array() - x.tail(p - m).mean();
                      return y;
                    }});
  return pick_pair(std::move(spaces), p);
}

Vector gen_exposure_linear(const Matrix& w, const Vector& theta, double sigma_g, std::uint64_t seed) {
  if (theta.size() != w.cols()) throw Error(ErrorCode::InvalidInput, "theta length does not match W");
  if (!(sigma_g >= 0.0)) throw Error(ErrorCode::InvalidInput, "sigma_g must be nonnegative");
  auto engine = rng::make_engine(seed);
  Vector a = rng::normal_vector(w.rows(), engine) * sigma_g;
  a.noalias() += w * theta;
  return a;
}

Vector gen_exposure_binomial(const Matrix& w, const Vector& theta, std::uint64_t seed) {
  if (theta.size() != w.cols()) throw Error(ErrorCode::InvalidInput, "theta length does not match W");
  auto engine = rng::make_engine(seed);
  const Vector eta = w * theta;
  Vector a(w.rows());
  for (Index i = 0; i < w.rows(); ++i) {
    const double q = logistic(eta[i]);
    const double u1 = rng::uniform01(engine), u2 = rng::uniform01(engine);
    a[i] = static_cast<double>((u1 < q) + (u2 < q));
  }
  return a;
}

CoefficientSpec CoefficientSpec::angle(double tau0) {
  CoefficientSpec s;
  s.mode = CoefMode::Fixed;
  s.fixed_kind = FixedKind::AngleToSpike;
  s.tau0 = tau0;
  return s;
}

CoefficientSpec CoefficientSpec::explicit_vector(Vector v, double bound) {
  CoefficientSpec s;
  s.mode = CoefMode::Fixed;
  s.fixed_kind = FixedKind::ExplicitVector;
  s.vector = std::move(v);
  s.norm_bound = bound;
  return s;
}

CoefficientSpec CoefficientSpec::population_least_squares() {
  CoefficientSpec s;
  s.mode = CoefMode::Fixed;
  s.fixed_kind = FixedKind::PopulationLeastSquares;
  return s;
}

CoefficientSpec CoefficientSpec::random(double variance, RandomLaw law) {
  CoefficientSpec s;
  s.mode = CoefMode::Random;
  s.variance = variance;
  s.law = law;
  return s;
}

CoefficientSpec CoefficientSpec::zero(Index p) { return explicit_vector(Vector::Zero(p)); }

Vector population_least_squares_single(double lambda, const Vector& v) {
  const Index p = v.size() - 1;
  if (p < 1) invalid_spec("joint direction needs at least two coordinates");
  const Vector rest = v.tail(p);
  return (lambda * v[0] / (1.0 + lambda * rest.squaredNorm())) * rest;
}

Vector make_beta(const CoefficientSpec& spec, const CoefficientContext& ctx, Index p, std::uint64_t seed) {
  if (spec.mode == CoefMode::Random) {
    if (!(spec.variance >= 0.0)) invalid_spec("random-effect variance must be nonnegative");
    const double sd = std::sqrt(spec.variance / static_cast<double>(p));
    auto engine = rng::make_engine(seed);
    if (spec.law == RandomLaw::Gaussian) return rng::normal_vector(p, engine) * sd;
    Vector b(p);
    for (Index i = 0; i < p; ++i) b[i] = (engine() >> 63) ? sd : -sd;
    return b;
  }
  switch (spec.fixed_kind) {
    case FixedKind::AngleToSpike: {
      if (!ctx.directions) invalid_spec("angle construction needs two population directions");
      const auto& d = *ctx.directions;
      if (d.v1.size() != p || d.v2.size() != p) invalid_spec("population directions have wrong length");
      if (std::isnan(spec.tau0)) invalid_spec("tau0 is NaN");
      const double a = std::isinf(spec.tau0) && spec.tau0 > 0 ? 1.0
                                                             : 1.0 - std::pow(static_cast<double>(p), -spec.tau0);
      if (a < 0.0 || a > 1.0) invalid_spec("angle parameter outside [0,1]; tau0 must be nonnegative");
      return a * d.v1 + std::sqrt(std::max(0.0, 1.0 - a * a)) * d.v2;
    }
    case FixedKind::ExplicitVector: {
      if (spec.vector.size() != p) invalid_spec("explicit coefficient has wrong length");
      if (spec.vector.norm() > spec.norm_bound * (1.0 + 1e-12)) invalid_spec("explicit coefficient exceeds norm bound");
      return spec.vector;
    }
    case FixedKind::PopulationLeastSquares: {
      if (!ctx.joint) invalid_spec("population least squares needs the joint covariance");
      const SpikeSpec& joint = *ctx.joint;
      joint.validate(p + 1);
      if (joint.bulk.empty() && joint.spikes.size() == 1)
        return population_least_squares_single(joint.spikes[0].eigenvalue - 1.0, joint.spikes[0].direction);
      const Matrix s = joint.covariance(p + 1);
      return s.bottomRightCorner(p, p).llt().solve(s.col(0).tail(p));
    }
  }
  invalid_spec("unknown coefficient construction");
}

Vector gen_outcome(const Vector& a, const Matrix& w, const Vector& beta, double delta, double sigma_y,
                   std::uint64_t seed) {
  if (a.size() != w.rows() || beta.size() != w.cols())
    throw Error(ErrorCode::InvalidInput, "outcome inputs have inconsistent dimensions");
  if (!(sigma_y >= 0.0)) throw Error(ErrorCode::InvalidInput, "sigma_y must be nonnegative");
  auto engine = rng::make_engine(seed);
  Vector y = rng::normal_vector(w.rows(), engine) * sigma_y;
  y.noalias() += w * beta;
  y += delta * a;
  return y;
}

double subspace_distance(const Vector& beta, const Matrix& basis) {
  const double nb = beta.squaredNorm();
  if (!(nb > 0.0)) throw Error(ErrorCode::InvalidInput, "subspace distance of the zero vector");
  const Vector r = linalg::residualize(beta, basis);
  return std::clamp(r.squaredNorm() / nb, 0.0, 1.0);
}

}  // namespace pcrlab::models
