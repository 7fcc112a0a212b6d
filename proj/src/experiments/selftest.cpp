#include "experiments/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "experiments/engine.hpp"
#include "experiments/output.hpp"
#include "models/models.hpp"
#include "pcr/test.hpp"
#include "rmt/limits.hpp"

namespace pcrlab::experiments {
namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

SelftestCheck check_inversion() {
  double worst = 0.0;
  for (double a : {1e-6, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.9, 0.999})
    worst = std::max(worst, std::abs(dist::noncentral_chi1_sf(dist::chi1_upper_quantile(a), 0.0) - a));
  return {"sf_quantile_inversion", worst <= 1e-9, fmt("max |sf(q(a)) - a| = %.3g", worst)};
}

SelftestCheck check_coefficients() {
  double worst = 0.0;
  for (double gamma : {0.5, 1.0, 2.0}) {
    const rmt::SpectralLaw h = rmt::SpectralLaw::point_mass(gamma);
    for (double lambda : {2.0, 3.0, 6.0, 20.0}) {
      if (lambda <= rmt::classical::bbp_threshold(gamma)) continue;
      const double ell = 1.0 + lambda;
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
      worst = std::max({worst, rel(rmt::psi(ell, h), rmt::classical::psi(lambda, gamma)),
                        rel(rmt::psi_prime(ell, h), rmt::classical::psi_prime(lambda, gamma)),
                        rel(rmt::xi(1, ell, h), rmt::classical::xi1(lambda, gamma)),
                        rel(rmt::xi(2, ell, h), rmt::classical::xi2(lambda, gamma)),
                        rel(rmt::phi(1, ell, h), rmt::classical::phi1_spike(lambda, gamma)),
                        rel(rmt::phi(2, ell, h), rmt::classical::phi2_spike(lambda, gamma)),
                        rel(rmt::phi_bulk(2, 1.0, h), rmt::classical::phi2_bulk(gamma))});
    }
  }
  return {"general_vs_classical_coefficients", worst <= 1e-12, fmt("max relative gap = %.3g", worst)};
}

SelftestCheck check_power_quadrature() {
  // loc = 0: LR = (Z1 + spread Z2)^2, exactly (1 + spread^2) chi2_1
  const double t = dist::chi1_upper_quantile(0.05);
  double worst = 0.0;
  for (double s : {0.25, 1.0, 3.0}) {
    const rmt::LimitLaw law{0.0, std::sqrt(s)};
    worst = std::max(worst, std::abs(rmt::asymptotic_power(t, law) - dist::noncentral_chi1_sf(t / (1.0 + s), 0.0)));
  }
  return {"power_quadrature_closed_form", worst <= 1e-8, fmt("max gap = %.3g", worst)};
}

SelftestCheck check_conditional_law() {
  const linalg::Index n = 200, p = 100, k = 1, draws = 2000;
  const auto spec = models::SpikeSpec::classical(4.0, linalg::Vector::Unit(p, 0));
  const std::uint64_t seed = 0xc0ffee;
  const linalg::Matrix w = models::gen_spiked(n, p, spec, rng::derive(seed, "W"));
  auto eng = rng::make_engine(rng::derive(seed, "coef"));
  const linalg::Vector theta = linalg::Vector::Unit(p, 0);
  const linalg::Vector beta = rng::normal_vector(p, eng) / std::sqrt(static_cast<double>(p));
  const linalg::Vector a = models::gen_exposure_linear(w, theta, 1.0, rng::derive(seed, "eta"));
  std::string detail;
  bool ok = true;
  for (pcr::Variant v : {pcr::Variant::Out, pcr::Variant::In}) {
    const pcr::PcAdjustment pcs(v == pcr::Variant::Out ? w : pcr::in_design(a, w), k);
    const pcr::ResidualExposure r = pcr::residual_exposure(a, pcs);
    const linalg::Vector signal = w * beta;
    const double kappa = pcr::kappa2_statistic(signal, r);
    std::vector<double> lr;
    auto noise = rng::make_engine(rng::derive(seed, "eps"));
    for (linalg::Index d = 0; d < draws; ++d) lr.push_back(pcr::lr_statistic(signal + rng::normal_vector(n, noise), r));
    const double ks = ks_distance(lr, [&](double x) { return dist::noncentral_chi1_cdf(x, kappa); });
    const double crit = ks_critical(0.01, lr.size());
    ok = ok && ks < crit;
    detail += fmt(v == pcr::Variant::Out ? "out: D=%.4f" : " in: D=%.4f", ks);
    detail += fmt(" (crit %.4f)", crit);
  }
  return {"conditional_law_ks", ok, detail};
}

SelftestCheck check_determinism() {
  ExperimentConfig c;
  c.n = 40;
  c.p = 30;
  c.reps = 6;
  c.tau0_grid = {0.0, 0.5};
  c.master_seed = 7;
  const std::string first = to_csv(run_experiment(c, 1));
  const std::string second = to_csv(run_experiment(c, 3));
  const auto cell1 = run_cell(c, 1, 2), cell2 = run_cell(c, 1, 2);
  bool same_cell = cell1.size() == cell2.size();
  for (std::size_t i = 0; same_cell && i < cell1.size(); ++i)
    same_cell = cell1[i].statistic == cell2[i].statistic && cell1[i].kappa2 == cell2[i].kappa2;
  const bool ok = first == second && same_cell;
  return {"determinism", ok, ok ? "repeated runs byte-identical across thread counts" : "outputs differ between runs"};
}

template <typename F>
SelftestCheck guarded(const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double ks_critical(double level, std::size_t n) {
  double c = 0.0;
  if (level == 0.01)
    c = 1.6276;
  else if (level == 0.05)
    c = 1.3581;
  else
    throw Error(ErrorCode::InvalidInput, "KS critical values are tabulated for 0.01 and 0.05 only");
  return c / std::sqrt(static_cast<double>(n));
}

std::vector<SelftestCheck> selftest() {
  return {guarded("sf_quantile_inversion", check_inversion),
          guarded("general_vs_classical_coefficients", check_coefficients),
          guarded("power_quadrature_closed_form", check_power_quadrature),
          guarded("conditional_law_ks", check_conditional_law), guarded("determinism", check_determinism)};
}

}  // namespace pcrlab::experiments
