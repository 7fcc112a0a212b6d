#pragma once

#include <optional>

#include "core/linalg.hpp"
#include "models/models.hpp"

namespace pcrlab::pcr {

using linalg::Index;
using linalg::Matrix;
using linalg::Vector;

enum class Variant { In, Out };
const char* to_string(Variant v);

enum class VarianceMode { Known, Plugin };

struct TestOutcome {
  double statistic = 0.0;
  std::optional<double> kappa2;
  Index k = 0;
  Variant variant = Variant::Out;
  double cutoff = 0.0;
  bool reject = false;
};

// [A : W], the design whose PCs the in-regression test removes.
Matrix in_design(const Vector& a, const Matrix& w);

// Top-k PC scores of a design, fitted once and reused for every exposure and
// outcome that shares the design.
class PcAdjustment {
 public:
  PcAdjustment(const Matrix& design, Index k);

  const Matrix& basis() const { return basis_; }  // design * V_k
  const Matrix& right_vectors() const { return right_; }
  Index k() const { return basis_.cols(); }
  Vector residualize(const Vector& x) const;

 private:
  Matrix basis_, right_;
};

// (I - P) A with the degeneracy check: |A_tilde| <= 1e-10 |A| is an error.
struct ResidualExposure {
  Vector a_tilde;
  double norm2 = 0.0;
};
ResidualExposure residual_exposure(const Vector& a, const PcAdjustment& pcs);

double lr_statistic(const Vector& y, const ResidualExposure& r);
double kappa2_statistic(const Vector& signal, const ResidualExposure& r);

double lr_out(const Vector& y, const Vector& a, const Matrix& w, Index k);
double lr_in(const Vector& y, const Vector& a, const Matrix& w, Index k);

// ((W beta + A delta)^T A_tilde)^2 / |A_tilde|^2 with the variant's projection.
double kappa2(const Vector& a, const Matrix& w, const Vector& beta, double delta, Index k, Variant variant);

// Plug-in sigma^2 from the residual of Y on [A_tilde, basis], n - k - 1 df.
double plugin_variance(const Vector& y, const ResidualExposure& r, const PcAdjustment& pcs);

TestOutcome run_test(const Vector& y, const Vector& a, const Matrix& w, Index k, Variant variant, double alpha,
                     VarianceMode variance = VarianceMode::Known);

// beta0 = (0, beta) in R^{p+1}; the joint spec describes X = [A : W] with a unit bulk.
double c_star_p(const Vector& beta0, const models::SpikeSpec& joint, double gamma);

}  // namespace pcrlab::pcr
