#include "experiments/reproduce.hpp"

#include <filesystem>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "experiments/engine.hpp"
#include "experiments/output.hpp"

namespace pcrlab::experiments {

std::vector<Panel> figure_panels(const std::string& figure, const std::string& scale, std::uint64_t master_seed) {
  Index p = 0, reps = 0;
  if (scale == "desk") {
    p = 200;
    reps = 500;
  } else if (scale == "paper") {
    p = 1000;
    reps = 2000;
  } else {
    throw Error(ErrorCode::ConfigError, "scale must be 'desk' or 'paper', got '" + scale + "'");
  }
  struct Setup {
    Model model;
    Exposure exposure;
    pcr::Variant variant;
  };
  std::vector<Setup> setups;
  if (figure == "fig1") {
    setups = {{Model::Spiked, Exposure::Linear, pcr::Variant::Out},
              {Model::GaussMixture, Exposure::Linear, pcr::Variant::Out},
              {Model::BinomMixture, Exposure::Binomial, pcr::Variant::Out}};
  } else if (figure == "fig2") {
    setups = {{Model::Spiked, Exposure::Linear, pcr::Variant::In}};
  } else {
    throw Error(ErrorCode::ConfigError, "figure must be 'fig1' or 'fig2', got '" + figure + "'");
  }

  std::vector<Panel> panels;
  for (const Setup& s : setups) {
    for (const auto& [gamma, tag] : {std::pair{2.0, "2"}, {0.5, "0.5"}}) {
      ExperimentConfig c;
      c.variant = s.variant;
      c.model = s.model;
      c.exposure = s.exposure;
      c.p = p;
      c.n = static_cast<Index>(static_cast<double>(p) / gamma);
      c.reps = reps;
      c.master_seed = rng::derive(master_seed, static_cast<std::uint64_t>(panels.size()));
      std::string file = figure + "_";
      file += s.variant == pcr::Variant::In ? "in_" : "";
      file += std::string(to_string(s.model)) + "_" + to_string(s.exposure) + "_gamma" + tag + ".csv";
      panels.push_back({file, c});
    }
  }
  return panels;
}

nlohmann::json reproduce(const std::string& figure, const std::string& scale, const std::string& out_dir,
                         std::uint64_t master_seed, unsigned threads) {
  const std::vector<Panel> panels = figure_panels(figure, scale, master_seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw Error(ErrorCode::IoError, "cannot create output directory '" + out_dir + "'");

  nlohmann::json m;
  m["figure"] = figure;
  m["scale"] = scale;
  m["master_seed"] = master_seed;
  nlohmann::json list = nlohmann::json::array();
  for (const Panel& panel : panels) {
    const ExperimentResult r = run_experiment(panel.config, threads);
    const std::string csv = to_csv(r);
    write_file((std::filesystem::path(out_dir) / panel.file).string(), csv);
    nlohmann::json entry = manifest(r);
    entry["file"] = panel.file;
    entry["csv_sha1"] = git_blob_sha1(csv);
    list.push_back(entry);
  }
  m["panels"] = list;
  write_file((std::filesystem::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
  return m;
}

}  // namespace pcrlab::experiments
