#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "experiments/config.hpp"
#include "json.hpp"

namespace pcrlab::experiments {

struct Panel {
  std::string file;
  ExperimentConfig config;
};

// fig1: out-regression, three model/exposure pairs x gamma in {2, 0.5}.
// fig2: in-regression spiked model, gamma in {2, 0.5}.
// scale: "desk" (p=200, 500 reps) or "paper" (p=1000, 2000 reps).
std::vector<Panel> figure_panels(const std::string& figure, const std::string& scale, std::uint64_t master_seed);

// Writes one CSV per panel plus manifest.json into out_dir; returns the manifest.
nlohmann::json reproduce(const std::string& figure, const std::string& scale, const std::string& out_dir,
                         std::uint64_t master_seed, unsigned threads);

constexpr std::uint64_t kDefaultReproduceSeed = 20240101;

}  // namespace pcrlab::experiments
