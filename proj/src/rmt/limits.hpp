#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pcrlab::rmt {

struct Atom {
  double value;
  double weight;
};

// Atomic limiting spectral law H of the non-spike eigenvalues, plus gamma = p/n.
struct SpectralLaw {
  std::vector<Atom> atoms;
  double gamma = 1.0;

  static SpectralLaw point_mass(double gamma, double at = 1.0);
  void validate() const;
  double mean() const;         // int a dH
  double second_moment() const;  // int a^2 dH
};

double psi(double alpha, const SpectralLaw& h);
double psi_prime(double alpha, const SpectralLaw& h);

enum class SpikeClass { Distant, Close };
SpikeClass classify_spike(double ell, const SpectralLaw& h);

// Population spike eigenvalue ell (covariance eigenvalue, 1 + lambda for the
// classical model). r must be 1 or 2.
double xi(int r, double ell, const SpectralLaw& h);
double phi_spike(int r, double ell, const SpectralLaw& h);  // distant spikes
double phi_bulk(int r, double ell, const SpectralLaw& h);   // non-spikes and close spikes
double phi(int r, double ell, const SpectralLaw& h);        // dispatches on classify_spike

// Closed forms for Sigma = I + lambda v v^T (H = delta_1); these take lambda.
namespace classical {
double psi(double lambda, double gamma);
double psi_prime(double lambda, double gamma);
double xi1(double lambda, double gamma);
double xi2(double lambda, double gamma);
double phi1_spike(double lambda, double gamma);
double phi2_spike(double lambda, double gamma);
double phi1_bulk(double gamma);
double phi2_bulk(double gamma);
double bbp_threshold(double gamma);  // on lambda: sqrt(gamma)
}  // namespace classical

struct Moments {
  double m1, m2;
};
Moments mp_moments(const SpectralLaw& h);

// theta described either by its squared norm and its projections on the
// spike directions, or as a random effect with coordinate variance var/p.
struct ThetaSpec {
  bool random = false;
  double variance = 1.0;
  double norm2 = 1.0;
  std::vector<double> spike_projections;  // <theta, v_j>, j = 1..k*
};

struct ScenarioConstants {
  double c0 = 0.0, c4 = 0.0;
  // The classical single-spike closed forms as printed alongside the
  // general sums: phi_11 / gamma and phi_21 respectively.
  std::optional<double> c0_printed, c4_printed;
};

// spikes: population eigenvalues ell_j, decreasing. k = number of removed PCs.
ScenarioConstants scenario_constants(const std::vector<double>& spikes, const SpectralLaw& h,
                                     const ThetaSpec& theta, int k);

enum class Scenario { BetaRandomThetaFixed, BetaFixedThetaRandom, BothRandom };
Scenario parse_scenario(const std::string& name);
const char* to_string(Scenario s);

struct LawParams {
  double sigma2_beta = 1.0, sigma2_theta = 1.0, sigma2_g = 1.0, h = 0.0;
  double c0 = 0.0, c4 = 0.0, m1 = 1.0, m2 = 1.0;
  double gamma = 1.0;  // only the both-random numerator uses it
  std::optional<double> c1;
};

// K = (location + spread * Z)^2, i.e. spread^2 times a noncentral chi2_1.
struct LimitLaw {
  double location = 0.0;
  double spread = 0.0;
  double scale() const { return spread * spread; }
  double ncp() const;
  double mean() const { return location * location + spread * spread; }
  double cdf(double x) const;
};

LimitLaw kappa2_limit_law(Scenario scenario, const LawParams& params);

// E over the limit law of P(chi2_1(K) > t).
double asymptotic_power(double t, const LimitLaw& law);

}  // namespace pcrlab::rmt
