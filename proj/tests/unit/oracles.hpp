#pragma once
// Slow, independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace oracle {

inline double chi1_sf(double t) { return std::erfc(std::sqrt(t / 2.0)); }

// Bisection on the central chi2_1 survival function.
inline double chi1_quantile_bisect(double alpha) {
  double lo = 0.0, hi = 200.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi1_sf(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double composite_simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// P(chi2_1(ncp) > t) by integrating the density of (Z + sqrt ncp)^2 after the
// substitution x = u^2, which removes the 1/sqrt(x) singularity.
inline double ncx1_sf_quadrature(double t, double ncp) {
  const double mu = std::sqrt(ncp);
  const double inv = 1.0 / std::sqrt(2.0 * M_PI);
  auto f = [&](double u) {
    return inv * (std::exp(-0.5 * (u - mu) * (u - mu)) + std::exp(-0.5 * (u + mu) * (u + mu)));
  };
  const double a = std::sqrt(t);
  const double b = std::max(a, mu) + 40.0;
  return composite_simpson(f, a, b, 40000);
}

// Top-k right singular vectors from a full Jacobi SVD.
inline Eigen::MatrixXd right_vectors(const Eigen::MatrixXd& m, int k) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  return svd.matrixV().leftCols(k);
}

// LR for delta from the normal equations of y ~ [A, W V_k]: deltahat^2 / [(X'X)^{-1}]_{11}.
inline double lr_normal_equations(const Eigen::VectorXd& y, const Eigen::VectorXd& a, const Eigen::MatrixXd& design,
                                  int k) {
  const Eigen::MatrixXd scores = design * right_vectors(design, k);
  Eigen::MatrixXd x(a.size(), k + 1);
  x.col(0) = a;
  x.rightCols(k) = scores;
  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
  const Eigen::VectorXd coef = xtx_inv * (x.transpose() * y);
  return coef[0] * coef[0] / xtx_inv(0, 0);
}

}  // namespace oracle
