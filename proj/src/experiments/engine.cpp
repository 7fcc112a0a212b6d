#include "experiments/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "rmt/limits.hpp"

namespace pcrlab::experiments {
namespace {

using models::Matrix;
using models::Vector;

models::MixtureSpec mixture_spec(Model model, Index p, double tau0) {
  models::MixtureSpec s;
  s.kind = model == Model::BinomMixture ? models::MixtureKind::BinomialTwoGroup : models::MixtureKind::GaussianMeanShift;
  s.m = models::differentiated_count(p, tau0);
  return s;
}

double angle_parameter(const ExperimentConfig& c, double tau0) { return c.angle_tau.value_or(tau0); }

void center_columns(Matrix& m) { m.rowwise() -= m.colwise().mean(); }

double statistic(const ExperimentConfig& c, const Vector& y, const pcr::ResidualExposure& r,
                 const pcr::PcAdjustment& pcs) {
  const double lr = pcr::lr_statistic(y, r);
  if (c.variance == pcr::VarianceMode::Plugin) return lr / pcr::plugin_variance(y, r, pcs);
  return lr / (c.sigma_y * c.sigma_y);
}

std::vector<ReplicationOutcome> run_out(const ExperimentConfig& c, double tau0, std::uint64_t seed) {
  const Index n = c.n, p = c.p;
  Matrix w;
  models::PrincipalPair dirs;
  if (c.model == Model::Spiked) {
    const models::SpikeSpec spec = models::SpikeSpec::classical(spike_lambda(c, tau0), Vector::Unit(p, 0));
    w = models::gen_spiked(n, p, spec, rng::derive(seed, "W"));
    dirs = models::principal_pair(spec, p);
  } else {
    const models::MixtureSpec spec = mixture_spec(c.model, p, tau0);
    w = models::gen_mixture(n, p, spec, rng::derive(seed, "W"));
    dirs = models::principal_pair(spec, p, c.center);
  }
  if (c.center) center_columns(w);

  const pcr::PcAdjustment pcs(w, c.k);
  const std::vector<ModeCombo> combos = mode_combos(c);
  models::CoefficientContext ctx;
  ctx.directions = dirs;
  const double tau = angle_parameter(c, tau0);

  auto coefficient = [&](Mode mode, double sigma, const char* tag) {
    const models::CoefficientSpec spec =
        mode == Mode::Fixed ? models::CoefficientSpec::angle(tau) : models::CoefficientSpec::random(sigma * sigma);
    return models::make_beta(spec, ctx, p, rng::derive(seed, tag));
  };

  struct Exposed {
    bool ready = false;
    bool degenerate = false;
    Vector a;
    pcr::ResidualExposure r;
  };
  Exposed exposed[2];
  auto exposure_for = [&](Mode mode) -> Exposed& {
    Exposed& e = exposed[static_cast<int>(mode)];
    if (e.ready) return e;
    e.ready = true;
    const Vector theta = coefficient(mode, c.sigma_theta, "theta");
    e.a = c.exposure == Exposure::Linear ? models::gen_exposure_linear(w, theta, c.sigma_g, rng::derive(seed, "eta"))
                                         : models::gen_exposure_binomial(w, theta, rng::derive(seed, "exposure"));
    try {
      e.r = pcr::residual_exposure(e.a, pcs);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::DegenerateExposure) throw;
      e.degenerate = true;
    }
    return e;
  };

  std::optional<Vector> wbeta[2];
  auto signal_beta = [&](Mode mode) -> const Vector& {
    auto& slot = wbeta[static_cast<int>(mode)];
    if (!slot) slot = Vector(w * coefficient(mode, c.sigma_beta, "beta"));
    return *slot;
  };

  auto eng = rng::make_engine(rng::derive(seed, "eps"));
  const Vector eps = rng::normal_vector(n, eng) * c.sigma_y;
  const double delta = c.h / std::sqrt(static_cast<double>(n));
  const double cutoff = dist::chi1_upper_quantile(c.alpha);
  const double s2 = c.sigma_y * c.sigma_y;

  std::vector<ReplicationOutcome> out;
  for (const ModeCombo& mc : combos) {
    ReplicationOutcome o;
    Exposed& e = exposure_for(*mc.theta);
    if (e.degenerate) {
      o.degenerate = true;
      out.push_back(o);
      continue;
    }
    const Vector signal = signal_beta(mc.beta) + delta * e.a;
    o.statistic = statistic(c, signal + eps, e.r, pcs);
    o.kappa2 = pcr::kappa2_statistic(signal, e.r) / s2;
    o.reject = o.statistic > cutoff;
    out.push_back(o);
  }
  return out;
}

std::vector<ReplicationOutcome> run_in(const ExperimentConfig& c, double tau0, std::uint64_t seed) {
  const Index n = c.n, p = c.p;
  const Vector v = in_direction(c);
  const models::SpikeSpec joint = models::SpikeSpec::classical(spike_lambda(c, tau0), v);
  Matrix x = models::gen_spiked(n, p + 1, joint, rng::derive(seed, "W"));
  if (c.center) center_columns(x);
  const Vector a = x.col(0);
  const Matrix w = x.rightCols(p);
  const std::vector<ModeCombo> combos = mode_combos(c);

  const pcr::PcAdjustment pcs(x, c.k);
  pcr::ResidualExposure r;
  try {
    r = pcr::residual_exposure(a, pcs);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::DegenerateExposure) throw;
    std::vector<ReplicationOutcome> out(combos.size());
    for (auto& o : out) o.degenerate = true;
    return out;
  }

  models::CoefficientContext ctx;
  ctx.joint = joint;
  auto eng = rng::make_engine(rng::derive(seed, "eps"));
  const Vector eps = rng::normal_vector(n, eng) * c.sigma_y;
  const double delta = c.h / std::sqrt(static_cast<double>(n));
  const double cutoff = dist::chi1_upper_quantile(c.alpha);
  const double s2 = c.sigma_y * c.sigma_y;

  std::vector<ReplicationOutcome> out;
  for (const ModeCombo& mc : combos) {
    const models::CoefficientSpec spec = mc.beta == Mode::Fixed
                                             ? models::CoefficientSpec::population_least_squares()
                                             : models::CoefficientSpec::random(c.sigma_beta * c.sigma_beta);
    const Vector beta = models::make_beta(spec, ctx, p, rng::derive(seed, "beta"));
    const Vector signal = w * beta + delta * a;
    ReplicationOutcome o;
    o.statistic = statistic(c, signal + eps, r, pcs);
    o.kappa2 = pcr::kappa2_statistic(signal, r) / s2;
    o.reject = o.statistic > cutoff;
    out.push_back(o);
  }
  return out;
}

}  // namespace

std::vector<ModeCombo> mode_combos(const ExperimentConfig& c) {
  std::vector<ModeCombo> out;
  for (Mode b : {Mode::Fixed, Mode::Random}) {
    if (c.beta_mode && *c.beta_mode != b) continue;
    if (c.variant == pcr::Variant::In) {
      out.push_back({b, std::nullopt});
      continue;
    }
    for (Mode t : {Mode::Fixed, Mode::Random}) {
      if (c.theta_mode && *c.theta_mode != t) continue;
      out.push_back({b, t});
    }
  }
  return out;
}

double spike_lambda(const ExperimentConfig& c, double tau0) {
  switch (c.spike_rule) {
    case SpikeRule::Power: return std::pow(static_cast<double>(c.p), tau0);
    case SpikeRule::Fixed: return c.spike_strength;
    case SpikeRule::MatchBinomMixture:
      return models::mixture_covariance(mixture_spec(Model::BinomMixture, c.p, tau0), c.p).spike_strength;
    case SpikeRule::MatchGaussMixture:
      return models::mixture_covariance(mixture_spec(Model::GaussMixture, c.p, tau0), c.p).spike_strength;
  }
  return 0.0;
}

Vector in_direction(const ExperimentConfig& c) {
  auto eng = rng::make_engine(rng::derive(c.master_seed, "in-direction"));
  const Vector v = rng::normal_vector(c.p + 1, eng);
  return v / v.norm();
}

std::vector<ReplicationOutcome> run_cell(const ExperimentConfig& c, std::size_t tau0_index, Index rep_index) {
  if (tau0_index >= c.tau0_grid.size()) throw Error(ErrorCode::InvalidInput, "tau0 index out of range");
  const std::uint64_t seed = rng::derive(c.master_seed, tau0_index, static_cast<std::uint64_t>(rep_index));
  const double tau0 = c.tau0_grid[tau0_index];
  return c.variant == pcr::Variant::Out ? run_out(c, tau0, seed) : run_in(c, tau0, seed);
}

std::optional<double> overlay_theory(const ExperimentConfig& c, double tau0, const ModeCombo& modes) {
  if (c.variant != pcr::Variant::Out || c.model != Model::Spiked || c.exposure != Exposure::Linear) return std::nullopt;
  if (modes.beta != Mode::Random || !modes.theta) return std::nullopt;
  if (c.variance != pcr::VarianceMode::Known || c.center) return std::nullopt;

  const rmt::SpectralLaw h = rmt::SpectralLaw::point_mass(c.gamma());
  const rmt::Moments mom = rmt::mp_moments(h);
  rmt::LawParams q;
  q.sigma2_beta = c.sigma_beta * c.sigma_beta;
  q.sigma2_theta = c.sigma_theta * c.sigma_theta;
  q.sigma2_g = c.sigma_g * c.sigma_g;
  q.h = c.h / c.sigma_y;  // the statistic is standardized by the known sigma_y
  q.m1 = mom.m1;
  q.m2 = mom.m2;
  q.gamma = c.gamma();
  rmt::Scenario scenario = rmt::Scenario::BothRandom;
  if (*modes.theta == Mode::Fixed) {
    scenario = rmt::Scenario::BetaRandomThetaFixed;
    const double tau = angle_parameter(c, tau0);
    const double a = 1.0 - std::pow(static_cast<double>(c.p), -tau);
    rmt::ThetaSpec theta;
    theta.norm2 = 1.0;
    theta.spike_projections = {a};
    const auto sc = rmt::scenario_constants({1.0 + spike_lambda(c, tau0)}, h, theta, static_cast<int>(c.k));
    q.c0 = sc.c0;
    q.c4 = sc.c4;
  }
  q.sigma2_beta /= c.sigma_y * c.sigma_y;
  return rmt::asymptotic_power(dist::chi1_upper_quantile(c.alpha), rmt::kappa2_limit_law(scenario, q));
}

unsigned threads_from_env(unsigned fallback) {
  if (const char* env = std::getenv("PCRLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  return fallback;
}

ExperimentResult run_experiment(const ExperimentConfig& c, unsigned threads) {
  c.validate();
  const std::vector<ModeCombo> combos = mode_combos(c);
  const std::size_t grid = c.tau0_grid.size();
  const auto reps = static_cast<std::size_t>(c.reps);
  const std::size_t tasks = grid * reps;
  std::vector<std::vector<ReplicationOutcome>> slots(tasks);
  std::vector<double> cpu_ms(tasks, 0.0);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      try {
        const auto start = std::chrono::steady_clock::now();
        slots[t] = run_cell(c, t / reps, static_cast<Index>(t % reps));
        cpu_ms[t] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(tasks, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  const double cutoff = dist::chi1_upper_quantile(c.alpha);
  ExperimentResult result{c, {}};
  for (std::size_t ti = 0; ti < grid; ++ti) {
    double tau_ms = 0.0;
    for (std::size_t r = 0; r < reps; ++r) tau_ms += cpu_ms[ti * reps + r];
    for (std::size_t m = 0; m < combos.size(); ++m) {
      ResultRow row;
      row.tau0 = c.tau0_grid[ti];
      row.modes = combos[m];
      row.reps = c.reps;
      double sum_k = 0.0, sum_size = 0.0, sum_accept = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const ReplicationOutcome& o = slots[ti * reps + r][m];
        if (o.degenerate) {
          ++row.degenerate;
          continue;
        }
        row.rejections += o.reject ? 1 : 0;
        sum_k += o.kappa2;
        sum_size += dist::noncentral_chi1_sf(cutoff, o.kappa2);
        sum_accept += dist::noncentral_chi1_cdf(cutoff, o.kappa2);
      }
      const Index eff = row.reps - row.degenerate;
      if (eff > 0) {
        row.rate = static_cast<double>(row.rejections) / static_cast<double>(eff);
        row.mc_se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(eff));
        row.mean_kappa2 = sum_k / static_cast<double>(eff);
        row.conditional_size = sum_size / static_cast<double>(eff);
        row.conditional_acceptance = sum_accept / static_cast<double>(eff);
      } else {
        row.rate = row.mc_se = row.mean_kappa2 = row.conditional_size = row.conditional_acceptance =
            std::nan("");
      }
      row.theory_rate = overlay_theory(c, row.tau0, row.modes);
      row.runtime_ms = tau_ms / static_cast<double>(combos.size());
      result.rows.push_back(row);
    }
  }
  return result;
}

}  // namespace pcrlab::experiments
