#include "experiments/config.hpp"

#include <cmath>
#include <set>

#include "core/errors.hpp"

namespace pcrlab::experiments {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "field '" + field + "': " + what);
}

template <typename T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    config_error(field, std::string("wrong type (") + e.what() + ")");
  }
}

Index get_count(const json& j, const std::string& field) {
  const json& v = j.at(field);
  if (!v.is_number_integer() && !v.is_number_unsigned()) config_error(field, "expected an integer");
  return static_cast<Index>(v.get<long long>());
}

double get_real(const json& j, const std::string& field) {
  const json& v = j.at(field);
  if (!v.is_number()) config_error(field, "expected a number");
  return v.get<double>();
}

template <typename E>
E parse_enum(const json& j, const std::string& field, std::initializer_list<std::pair<const char*, E>> options) {
  const std::string s = get_as<std::string>(j, field);
  std::string allowed;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    allowed += allowed.empty() ? name : std::string("|") + name;
  }
  config_error(field, "'" + s + "' is not one of " + allowed);
}

}  // namespace

const char* to_string(Model m) {
  switch (m) {
    case Model::Spiked: return "spiked";
    case Model::GaussMixture: return "gauss_mixture";
    case Model::BinomMixture: return "binom_mixture";
  }
  return "?";
}

const char* to_string(Exposure e) { return e == Exposure::Linear ? "linear" : "binomial"; }
const char* to_string(Mode m) { return m == Mode::Fixed ? "fixed" : "random"; }

const char* to_string(SpikeRule r) {
  switch (r) {
    case SpikeRule::Power: return "power";
    case SpikeRule::Fixed: return "fixed";
    case SpikeRule::MatchBinomMixture: return "match_binom_mixture";
    case SpikeRule::MatchGaussMixture: return "match_gauss_mixture";
  }
  return "?";
}

std::vector<double> default_tau0_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

ExperimentConfig::ExperimentConfig() : tau0_grid(default_tau0_grid()) {}

void ExperimentConfig::validate() const {
  if (n < 2) config_error("n", "must be at least 2");
  if (p < 2) config_error("p", "must be at least 2");
  const Index cols = variant == pcr::Variant::In ? p + 1 : p;
  if (k < 1 || k >= std::min(n, cols)) config_error("k", "must satisfy 1 <= k < min(n, p)");
  if (!(alpha > 0.0 && alpha < 1.0)) config_error("alpha", "must lie in (0,1)");
  if (reps < 1) config_error("reps", "must be at least 1");
  if (tau0_grid.empty()) config_error("tau0_grid", "must not be empty");
  for (double t : tau0_grid)
    if (!(t >= 0.0 && t <= 1.0)) config_error("tau0_grid", "values must lie in [0,1]");
  for (auto [name, v] : {std::pair{"sigma_y", sigma_y}, {"sigma_g", sigma_g}, {"sigma_beta", sigma_beta},
                         {"sigma_theta", sigma_theta}})
    if (!(v > 0.0) || !std::isfinite(v)) config_error(name, "must be a positive real");
  if (!std::isfinite(h)) config_error("h", "must be finite");
  if (variant == pcr::Variant::In) {
    if (model != Model::Spiked) config_error("model", "the in-regression variant uses the spiked model");
    if (theta_mode) config_error("theta_mode", "not used by the in-regression variant");
  }
  if (spike_rule == SpikeRule::Fixed && !(spike_strength > 0.0)) config_error("spike_strength", "must be positive");
  if (spike_rule != SpikeRule::Power && model != Model::Spiked)
    config_error("spike_rule", "only applies to the spiked model");
  if (angle_tau && !(*angle_tau >= 0.0)) config_error("angle_tau", "must be nonnegative");
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) config_error("<root>", "expected a JSON object");
  static const std::set<std::string> known = {
      "variant", "model", "exposure", "n", "p", "k", "alpha", "reps", "tau0_grid", "beta_mode", "theta_mode",
      "sigma_y", "sigma_g", "sigma_beta", "sigma_theta", "h", "master_seed", "center", "variance", "spike_rule",
      "spike_strength", "angle_tau"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) config_error(item.key(), "unknown field");

  ExperimentConfig c;
  if (j.contains("variant"))
    c.variant = parse_enum<pcr::Variant>(j, "variant", {{"out", pcr::Variant::Out}, {"in", pcr::Variant::In}});
  if (j.contains("model"))
    c.model = parse_enum<Model>(j, "model", {{"spiked", Model::Spiked},
                                             {"gauss_mixture", Model::GaussMixture},
                                             {"binom_mixture", Model::BinomMixture}});
  if (j.contains("exposure"))
    c.exposure = parse_enum<Exposure>(j, "exposure", {{"linear", Exposure::Linear}, {"binomial", Exposure::Binomial}});
  if (j.contains("n")) c.n = get_count(j, "n");
  if (j.contains("p")) c.p = get_count(j, "p");
  if (j.contains("k")) c.k = get_count(j, "k");
  if (j.contains("alpha")) c.alpha = get_real(j, "alpha");
  if (j.contains("reps")) c.reps = get_count(j, "reps");
  if (j.contains("tau0_grid")) {
    if (!j["tau0_grid"].is_array()) config_error("tau0_grid", "expected an array of numbers");
    c.tau0_grid.clear();
    for (const auto& v : j["tau0_grid"]) {
      if (!v.is_number()) config_error("tau0_grid", "expected an array of numbers");
      c.tau0_grid.push_back(v.get<double>());
    }
  }
  const std::initializer_list<std::pair<const char*, Mode>> modes = {{"fixed", Mode::Fixed}, {"random", Mode::Random}};
  if (j.contains("beta_mode") && !j["beta_mode"].is_null()) c.beta_mode = parse_enum<Mode>(j, "beta_mode", modes);
  if (j.contains("theta_mode") && !j["theta_mode"].is_null()) c.theta_mode = parse_enum<Mode>(j, "theta_mode", modes);
  for (auto [name, dst] : {std::pair{"sigma_y", &c.sigma_y}, {"sigma_g", &c.sigma_g}, {"sigma_beta", &c.sigma_beta},
                           {"sigma_theta", &c.sigma_theta}, {"h", &c.h}, {"spike_strength", &c.spike_strength}})
    if (j.contains(name)) *dst = get_real(j, name);
  if (j.contains("master_seed")) {
    const json& v = j["master_seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      config_error("master_seed", "expected a nonnegative integer");
    c.master_seed = v.get<std::uint64_t>();
  }
  if (j.contains("center")) c.center = get_as<bool>(j, "center");
  if (j.contains("variance"))
    c.variance = parse_enum<pcr::VarianceMode>(
        j, "variance", {{"known", pcr::VarianceMode::Known}, {"plugin", pcr::VarianceMode::Plugin}});
  if (j.contains("spike_rule"))
    c.spike_rule = parse_enum<SpikeRule>(j, "spike_rule", {{"power", SpikeRule::Power},
                                                           {"fixed", SpikeRule::Fixed},
                                                           {"match_binom_mixture", SpikeRule::MatchBinomMixture},
                                                           {"match_gauss_mixture", SpikeRule::MatchGaussMixture}});
  if (j.contains("angle_tau") && !j["angle_tau"].is_null()) c.angle_tau = get_real(j, "angle_tau");
  c.validate();
  return c;
}

ExperimentConfig config_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  // nlohmann::json objects keep keys sorted, which makes the dump canonical
  json j;
  j["variant"] = pcr::to_string(c.variant);
  j["model"] = to_string(c.model);
  j["exposure"] = to_string(c.exposure);
  j["n"] = c.n;
  j["p"] = c.p;
  j["k"] = c.k;
  j["alpha"] = c.alpha;
  j["reps"] = c.reps;
  j["tau0_grid"] = c.tau0_grid;
  j["beta_mode"] = c.beta_mode ? json(to_string(*c.beta_mode)) : json(nullptr);
  j["theta_mode"] = c.theta_mode ? json(to_string(*c.theta_mode)) : json(nullptr);
  j["sigma_y"] = c.sigma_y;
  j["sigma_g"] = c.sigma_g;
  j["sigma_beta"] = c.sigma_beta;
  j["sigma_theta"] = c.sigma_theta;
  j["h"] = c.h;
  j["master_seed"] = c.master_seed;
  j["center"] = c.center;
  j["variance"] = c.variance == pcr::VarianceMode::Known ? "known" : "plugin";
  j["spike_rule"] = to_string(c.spike_rule);
  j["spike_strength"] = c.spike_strength;
  j["angle_tau"] = c.angle_tau ? json(*c.angle_tau) : json(nullptr);
  return j;
}

}  // namespace pcrlab::experiments
