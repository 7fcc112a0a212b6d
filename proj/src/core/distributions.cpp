#include "core/distributions.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "core/errors.hpp"

namespace pcrlab::dist {
namespace {

void check_nonneg(double t, double ncp) {
  if (!(t >= 0.0) || !(ncp >= 0.0) || std::isinf(ncp))
    throw Error(ErrorCode::InvalidInput, "t and ncp must be finite and nonnegative");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double chi1_upper_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::InvalidInput, "alpha must lie in (0,1), got " + std::to_string(alpha));
  // Phi^{-1}(1 - alpha/2) = sqrt(2) erfc^{-1}(alpha)
  const double z = std::sqrt(2.0) * boost::math::erfc_inv(alpha);
  return z * z;
}

double noncentral_chi1_sf(double t, double ncp) {
  check_nonneg(t, ncp);
  if (std::isinf(t)) return 0.0;
  const double a = std::sqrt(t), b = std::sqrt(ncp);
  return normal_sf(a - b) + normal_sf(a + b);
}

double noncentral_chi1_cdf(double t, double ncp) {
  check_nonneg(t, ncp);
  if (std::isinf(t)) return 1.0;
  const double a = std::sqrt(t), b = std::sqrt(ncp);
  const double v = normal_cdf(a - b) - normal_sf(a + b);
  return v < 0.0 ? 0.0 : v;
}

}  // namespace pcrlab::dist
