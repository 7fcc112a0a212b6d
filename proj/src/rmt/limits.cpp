#include "rmt/limits.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core/distributions.hpp"
#include "core/errors.hpp"

namespace pcrlab::rmt {
namespace {

constexpr double kDistantTol = 1e-12;

void check_r(int r) {
  if (r != 1 && r != 2) throw Error(ErrorCode::InvalidInput, "r must be 1 or 2");
}

void check_alpha(double alpha, const SpectralLaw& h) {
  h.validate();
  if (alpha == 0.0 || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidInput, "alpha must be finite and nonzero");
  for (const auto& a : h.atoms)
    if (std::abs(alpha - a.value) <= 1e-14 * std::max(1.0, std::abs(a.value)))
      throw Error(ErrorCode::SingularityError, "alpha lies on the support of H");
}

bool is_unit_point_mass(const SpectralLaw& h) {
  return h.atoms.size() == 1 && h.atoms[0].value == 1.0;
}

}  // namespace

SpectralLaw SpectralLaw::point_mass(double gamma, double at) { return SpectralLaw{{{at, 1.0}}, gamma}; }

void SpectralLaw::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::InvalidInput, "gamma must be positive");
  if (atoms.empty()) throw Error(ErrorCode::InvalidInput, "spectral law has no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.value > 0.0) || !std::isfinite(a.value)) throw Error(ErrorCode::InvalidInput, "atom values must be positive");
    if (!(a.weight >= 0.0)) throw Error(ErrorCode::InvalidInput, "atom weights must be nonnegative");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidInput, "atom weights must sum to 1");
}

double SpectralLaw::mean() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * a.value;
  return s;
}

double SpectralLaw::second_moment() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * a.value * a.value;
  return s;
}

double psi(double alpha, const SpectralLaw& h) {
  check_alpha(alpha, h);
  double s = 0.0;
  for (const auto& a : h.atoms) s += a.weight * a.value / (alpha - a.value);
  return alpha + h.gamma * alpha * s;
}

double psi_prime(double alpha, const SpectralLaw& h) {
  check_alpha(alpha, h);
  double s = 0.0;
  for (const auto& a : h.atoms) {
    const double d = alpha - a.value;
    s += a.weight * a.value * a.value / (d * d);
  }
  return 1.0 - h.gamma * s;
}

SpikeClass classify_spike(double ell, const SpectralLaw& h) {
  // psi' = 0 at the boundary itself counts as close
  return psi_prime(ell, h) > kDistantTol ? SpikeClass::Distant : SpikeClass::Close;
}

double xi(int r, double ell, const SpectralLaw& h) {
  check_r(r);
  if (classify_spike(ell, h) != SpikeClass::Distant)
    throw Error(ErrorCode::NotApplicable, "xi is defined for distant spikes only");
  const double d = psi_prime(ell, h);
  return r == 1 ? ell * d : ell * psi(ell, h) * d;
}

double phi_spike(int r, double ell, const SpectralLaw& h) {
  check_r(r);
  const double dp = psi_prime(ell, h);
  if (r == 1) return ell * (1.0 - dp);
  double s = 0.0;
  for (const auto& a : h.atoms) {
    const double d = ell - a.value;
    s += a.weight * a.value * a.value * a.value / (d * d);
  }
  // second term carries a factor ell; see the ledger for the reconciliation
  return h.gamma * ell * s + (psi(ell, h) - ell) * ell * (1.0 - dp);
}

double phi_bulk(int r, double ell, const SpectralLaw& h) {
  check_r(r);
  h.validate();
  return r == 1 ? ell : ell * ell + h.gamma * ell * h.mean();
}

double phi(int r, double ell, const SpectralLaw& h) {
  return classify_spike(ell, h) == SpikeClass::Distant ? phi_spike(r, ell, h) : phi_bulk(r, ell, h);
}

namespace classical {

double psi(double lambda, double gamma) { return (1.0 + lambda) * (1.0 + gamma / lambda); }
double psi_prime(double lambda, double gamma) { return 1.0 - gamma / (lambda * lambda); }
double xi1(double lambda, double gamma) { return (1.0 + lambda) * (1.0 - gamma / (lambda * lambda)); }
double xi2(double lambda, double gamma) {
  return (1.0 + lambda) * (1.0 + lambda) * (1.0 + gamma / lambda) * (1.0 - gamma / (lambda * lambda));
}
double phi1_spike(double lambda, double gamma) { return gamma * (lambda + 1.0) / (lambda * lambda); }
double phi2_spike(double lambda, double gamma) {
  const double l1 = lambda + 1.0;
  return gamma * l1 / (lambda * lambda) + gamma * gamma * l1 * l1 / (lambda * lambda * lambda);
}
double phi1_bulk(double) { return 1.0; }
double phi2_bulk(double gamma) { return 1.0 + gamma; }
double bbp_threshold(double gamma) { return std::sqrt(gamma); }

}  // namespace classical

Moments mp_moments(const SpectralLaw& h) {
  h.validate();
  const double mu1 = h.mean();
  // (1/p) tr(S) and (1/p) tr(S^2); zero eigenvalues for gamma > 1 add nothing
  return {mu1, h.second_moment() + h.gamma * mu1 * mu1};
}

ScenarioConstants scenario_constants(const std::vector<double>& spikes, const SpectralLaw& h, const ThetaSpec& theta,
                                     int k) {
  h.validate();
  if (k < 0) throw Error(ErrorCode::InvalidInput, "k must be nonnegative");
  const Moments mom = mp_moments(h);
  ScenarioConstants out;
  if (theta.random) {
    if (!(theta.variance >= 0.0)) throw Error(ErrorCode::InvalidInput, "theta variance must be nonnegative");
    out.c0 = theta.variance * mom.m1;
    out.c4 = theta.variance * mom.m2 / h.gamma;
    return out;
  }
  if (theta.spike_projections.size() != spikes.size())
    throw Error(ErrorCode::InvalidInput, "need one theta projection per spike");
  double s1 = 0.0, s2 = 0.0, spike_mass = 0.0;
  for (std::size_t j = 0; j < spikes.size(); ++j) {
    const double ell = spikes[j];
    const double w = theta.spike_projections[j] * theta.spike_projections[j];
    spike_mass += w;
    if (classify_spike(ell, h) == SpikeClass::Distant) {
      const bool removed = static_cast<int>(j) < k;
      // a retained sample spike keeps its own xi term on top of the leakage
      s1 += w * (phi_spike(1, ell, h) + (removed ? 0.0 : xi(1, ell, h)));
      s2 += w * (phi_spike(2, ell, h) + (removed ? 0.0 : xi(2, ell, h)));
    } else {
      s1 += w * phi_bulk(1, ell, h);
      s2 += w * phi_bulk(2, ell, h);
    }
  }
  // non-spike part of theta, spread over the bulk like H
  const double rest = std::max(0.0, theta.norm2 - spike_mass);
  s1 += rest * mom.m1;
  s2 += rest * mom.m2;
  out.c0 = s1;
  out.c4 = s2 / h.gamma;

  if (spikes.size() == 1 && is_unit_point_mass(h) && k >= 1) {
    const double lambda = spikes[0] - 1.0;
    if (lambda > classical::bbp_threshold(h.gamma)) {
      const double w = theta.spike_projections[0] * theta.spike_projections[0];
      out.c0_printed = w * (lambda + 1.0) / (lambda * lambda) + rest * 1.0;
      out.c4_printed = w * classical::phi2_spike(lambda, h.gamma) + rest * classical::phi2_bulk(h.gamma) / h.gamma;
    }
  }
  return out;
}

Scenario parse_scenario(const std::string& name) {
  if (name == "beta_random_theta_fixed") return Scenario::BetaRandomThetaFixed;
  if (name == "beta_fixed_theta_random") return Scenario::BetaFixedThetaRandom;
  if (name == "both_random") return Scenario::BothRandom;
  throw Error(ErrorCode::InvalidInput, "unknown scenario '" + name + "'");
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::BetaRandomThetaFixed: return "beta_random_theta_fixed";
    case Scenario::BetaFixedThetaRandom: return "beta_fixed_theta_random";
    case Scenario::BothRandom: return "both_random";
  }
  return "unknown";
}

double LimitLaw::ncp() const {
  if (spread == 0.0) return location == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (location / spread) * (location / spread);
}

double LimitLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  const double r = std::sqrt(x);
  if (spread == 0.0) return location * location <= x ? 1.0 : 0.0;
  return dist::normal_cdf((r - location) / spread) - dist::normal_cdf((-r - location) / spread);
}

LimitLaw kappa2_limit_law(Scenario scenario, const LawParams& q) {
  for (double v : {q.sigma2_beta, q.sigma2_theta, q.sigma2_g, q.c0, q.c4, q.m1, q.m2})
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "law parameters must be finite and nonnegative");
  if (!std::isfinite(q.h)) throw Error(ErrorCode::InvalidInput, "h must be finite");
  double denom = 0.0, var = 0.0;
  switch (scenario) {
    case Scenario::BetaRandomThetaFixed:
      denom = q.c0 + q.sigma2_g;
      var = q.sigma2_beta * (q.sigma2_g * q.m1 + q.c4);
      break;
    case Scenario::BothRandom:
      if (!(q.gamma > 0.0)) throw Error(ErrorCode::InvalidInput, "gamma must be positive");
      denom = q.sigma2_theta * q.m1 + q.sigma2_g;
      var = q.sigma2_beta * (q.sigma2_g * q.m1 + q.sigma2_theta * q.m2 / q.gamma);
      break;
    case Scenario::BetaFixedThetaRandom:
      if (!q.c1) throw Error(ErrorCode::NotAvailable, "beta_fixed_theta_random needs the empirical constant C1");
      if (!(*q.c1 >= 0.0)) throw Error(ErrorCode::InvalidInput, "C1 must be nonnegative");
      denom = q.sigma2_theta * q.m1 + q.sigma2_g;
      var = *q.c1;
      break;
  }
  if (!(denom > 0.0)) throw Error(ErrorCode::InvalidInput, "limit-law denominator must be positive");
  return LimitLaw{q.h * std::sqrt(denom), std::sqrt(var / denom)};
}

double asymptotic_power(double t, const LimitLaw& law) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidInput, "t must be nonnegative");
  if (law.spread == 0.0) return dist::noncentral_chi1_sf(t, law.location * law.location);
  const double rt = std::sqrt(t);
  auto f = [&](double z) {
    const double x = law.location + law.spread * z;
    // sf(t, x^2) written to stay smooth through x = 0
    const double sf = dist::normal_sf(rt - x) + dist::normal_sf(rt + x);
    return std::exp(-0.5 * z * z) * sf;
  };
  using boost::math::quadrature::gauss_kronrod;
  const double integral = gauss_kronrod<double, 61>::integrate(f, -12.0, 12.0, 20, 1e-13);
  const double v = integral / std::sqrt(2.0 * M_PI);
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace pcrlab::rmt
