#pragma once

#include <optional>
#include <vector>

#include "experiments/config.hpp"
#include "models/models.hpp"

namespace pcrlab::experiments {

struct ModeCombo {
  Mode beta;
  std::optional<Mode> theta;  // absent for the in-regression variant
};

// Out: (fixed,fixed), (fixed,random), (random,fixed), (random,random), filtered
// by the config. In: beta fixed, beta random.
std::vector<ModeCombo> mode_combos(const ExperimentConfig& c);

struct ReplicationOutcome {
  bool degenerate = false;
  bool reject = false;
  double statistic = 0.0;
  double kappa2 = 0.0;  // scaled by 1/sigma_y^2, the noncentrality of the statistic
};

// One draw for every mode combination; the design and noise are shared across
// modes. Deterministic in (config, tau0_index, rep_index).
std::vector<ReplicationOutcome> run_cell(const ExperimentConfig& c, std::size_t tau0_index, Index rep_index);

struct ResultRow {
  double tau0 = 0.0;
  ModeCombo modes;
  Index reps = 0;
  Index degenerate = 0;
  Index rejections = 0;
  double rate = 0.0;    // rejections / (reps - degenerate)
  double mc_se = 0.0;
  std::optional<double> theory_rate;
  double mean_kappa2 = 0.0;
  // mean over replications of P(chi2_1(kappa2) > cutoff): the size given the designs
  double conditional_size = 0.0;
  // 1 - conditional_size, accumulated from the cdf so it keeps precision near size 1
  double conditional_acceptance = 0.0;
  double runtime_ms = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;  // tau0-major, modes in mode_combos order
};

ExperimentResult run_experiment(const ExperimentConfig& c, unsigned threads = 1);

// Asymptotic size/power for the cell, where a closed-form limit exists.
std::optional<double> overlay_theory(const ExperimentConfig& c, double tau0, const ModeCombo& modes);

// Spike strength lambda of the spiked model at tau0.
double spike_lambda(const ExperimentConfig& c, double tau0);

// Direction of the single spike for the in-regression variant, shared by all tau0.
models::Vector in_direction(const ExperimentConfig& c);

unsigned threads_from_env(unsigned fallback);

}  // namespace pcrlab::experiments
