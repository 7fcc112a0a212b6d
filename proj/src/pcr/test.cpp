#include "pcr/test.hpp"

#include <cmath>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "rmt/limits.hpp"

namespace pcrlab::pcr {

const char* to_string(Variant v) { return v == Variant::In ? "in" : "out"; }

Matrix in_design(const Vector& a, const Matrix& w) {
  if (a.size() != w.rows()) throw Error(ErrorCode::InvalidInput, "A and W have different row counts");
  Matrix x(w.rows(), w.cols() + 1);
  x.col(0) = a;
  x.rightCols(w.cols()) = w;
  return x;
}

PcAdjustment::PcAdjustment(const Matrix& design, Index k) {
  const linalg::ThinSvd svd = linalg::leading_svd(design, k);
  right_ = svd.right;
  basis_ = design * right_;
}

Vector PcAdjustment::residualize(const Vector& x) const { return linalg::residualize(x, basis_); }

ResidualExposure residual_exposure(const Vector& a, const PcAdjustment& pcs) {
  ResidualExposure r{pcs.residualize(a), 0.0};
  r.norm2 = r.a_tilde.squaredNorm();
  if (!(std::sqrt(r.norm2) > 1e-10 * a.norm()))
    throw Error(ErrorCode::DegenerateExposure, "exposure lies in the span of the removed principal components");
  return r;
}

double lr_statistic(const Vector& y, const ResidualExposure& r) {
  if (y.size() != r.a_tilde.size()) throw Error(ErrorCode::InvalidInput, "Y has the wrong length");
  const double ip = y.dot(r.a_tilde);
  return ip * ip / r.norm2;
}

double kappa2_statistic(const Vector& signal, const ResidualExposure& r) { return lr_statistic(signal, r); }

double lr_out(const Vector& y, const Vector& a, const Matrix& w, Index k) {
  const PcAdjustment pcs(w, k);
  return lr_statistic(y, residual_exposure(a, pcs));
}

double lr_in(const Vector& y, const Vector& a, const Matrix& w, Index k) {
  const PcAdjustment pcs(in_design(a, w), k);
  return lr_statistic(y, residual_exposure(a, pcs));
}

double kappa2(const Vector& a, const Matrix& w, const Vector& beta, double delta, Index k, Variant variant) {
  if (beta.size() != w.cols()) throw Error(ErrorCode::InvalidInput, "beta has the wrong length");
  const PcAdjustment pcs(variant == Variant::Out ? w : in_design(a, w), k);
  const Vector signal = w * beta + delta * a;
  return kappa2_statistic(signal, residual_exposure(a, pcs));
}

double plugin_variance(const Vector& y, const ResidualExposure& r, const PcAdjustment& pcs) {
  const Index n = y.size();
  const Index df = n - pcs.k() - 1;
  if (df < 1) throw Error(ErrorCode::RankError, "no residual degrees of freedom for the variance estimate");
  // A_tilde is orthogonal to the basis, so the two projections add
  const double rss = pcs.residualize(y).squaredNorm() - lr_statistic(y, r);
  return std::max(rss, 0.0) / static_cast<double>(df);
}

TestOutcome run_test(const Vector& y, const Vector& a, const Matrix& w, Index k, Variant variant, double alpha,
                     VarianceMode variance) {
  const PcAdjustment pcs(variant == Variant::Out ? w : in_design(a, w), k);
  const ResidualExposure r = residual_exposure(a, pcs);
  TestOutcome out;
  out.statistic = lr_statistic(y, r);
  if (variance == VarianceMode::Plugin) {
    const double s2 = plugin_variance(y, r, pcs);
    if (!(s2 > 0.0)) throw Error(ErrorCode::RankError, "plug-in variance is zero");
    out.statistic /= s2;
  }
  out.k = k;
  out.variant = variant;
  out.cutoff = dist::chi1_upper_quantile(alpha);
  out.reject = out.statistic > out.cutoff;
  return out;
}

double c_star_p(const Vector& beta0, const models::SpikeSpec& joint, double gamma) {
  const Index dim = beta0.size();
  joint.validate(dim);
  if (!joint.bulk.empty()) throw Error(ErrorCode::InvalidSpec, "c*_p needs the unit bulk");
  const rmt::SpectralLaw h = rmt::SpectralLaw::point_mass(gamma);
  // sum_j phi_1j v_j v_j^T with phi = 1 on the bulk
  double c = beta0[0];
  for (const auto& s : joint.spikes)
    c += (rmt::phi(1, s.eigenvalue, h) - 1.0) * beta0.dot(s.direction) * s.direction[0];
  return c;
}

}  // namespace pcrlab::pcr
