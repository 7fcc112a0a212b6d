#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pcr/test.hpp"

namespace pcrlab::experiments {

using linalg::Index;

enum class Model { Spiked, GaussMixture, BinomMixture };
enum class Exposure { Linear, Binomial };
enum class Mode { Fixed, Random };

// How the spiked model's strength follows tau0.
enum class SpikeRule { Power, Fixed, MatchBinomMixture, MatchGaussMixture };

const char* to_string(Model m);
const char* to_string(Exposure e);
const char* to_string(Mode m);
const char* to_string(SpikeRule r);

struct ExperimentConfig {
  pcr::Variant variant = pcr::Variant::Out;
  Model model = Model::Spiked;
  Exposure exposure = Exposure::Linear;
  Index n = 500;
  Index p = 1000;
  Index k = 1;
  double alpha = 0.05;
  Index reps = 2000;
  std::vector<double> tau0_grid;
  std::optional<Mode> beta_mode, theta_mode;  // unset: sweep both
  double sigma_y = 1.0, sigma_g = 1.0, sigma_beta = 1.0, sigma_theta = 1.0;
  double h = 0.0;
  std::uint64_t master_seed = 20240101;
  bool center = false;
  pcr::VarianceMode variance = pcr::VarianceMode::Known;

  // Spiked strength: p^tau0 by default, or a constant, or matched to the
  // spike strength of the mixture with m = ceil(p^tau0).
  SpikeRule spike_rule = SpikeRule::Power;
  double spike_strength = 0.0;
  // Angle parameter for fixed coefficients; unset couples it to tau0.
  std::optional<double> angle_tau;

  ExperimentConfig();
  void validate() const;
  double gamma() const { return static_cast<double>(p) / static_cast<double>(n); }
};

std::vector<double> default_tau0_grid();

// Parse with field-level diagnostics; every error is ErrorCode::ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig config_from_text(const std::string& text);
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace pcrlab::experiments
