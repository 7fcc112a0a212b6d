#include "experiments/queries.hpp"

#include <set>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "experiments/output.hpp"
#include "rmt/limits.hpp"

namespace pcrlab::experiments {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double number(const json& j, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_number()) config_error(std::string("field '") + field + "': expected a number");
  return j[field].get<double>();
}

std::vector<double> numbers(const json& j, const char* field) {
  std::vector<double> out;
  if (!j.contains(field)) return out;
  if (!j[field].is_array()) config_error(std::string("field '") + field + "': expected an array of numbers");
  for (const auto& v : j[field]) {
    if (!v.is_number()) config_error(std::string("field '") + field + "': expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

struct Query {
  rmt::SpectralLaw law;
  std::vector<double> spikes;  // population eigenvalues
  rmt::ThetaSpec theta;
  int k = 1;
  bool require_distant = true;
};

Query parse_query(const json& j, const std::set<std::string>& extra) {
  if (!j.is_object()) config_error("expected a JSON object");
  std::set<std::string> known = {"gamma", "bulk", "spikes", "lambdas", "theta", "k", "require_distant"};
  known.insert(extra.begin(), extra.end());
  for (const auto& item : j.items())
    if (!known.count(item.key())) config_error("field '" + item.key() + "': unknown field");
  Query q;
  if (!j.contains("gamma")) config_error("field 'gamma': required");
  q.law.gamma = number(j, "gamma", 1.0);
  if (j.contains("bulk")) {
    if (!j["bulk"].is_array()) config_error("field 'bulk': expected an array of {value, weight}");
    for (const auto& a : j["bulk"]) {
      if (!a.is_object() || !a.contains("value") || !a.contains("weight"))
        config_error("field 'bulk': expected an array of {value, weight}");
      q.law.atoms.push_back({number(a, "value", 0.0), number(a, "weight", 0.0)});
    }
  } else {
    q.law.atoms = {{1.0, 1.0}};
  }
  if (j.contains("spikes") && j.contains("lambdas")) config_error("give either 'spikes' or 'lambdas', not both");
  q.spikes = numbers(j, "spikes");
  for (double l : numbers(j, "lambdas")) q.spikes.push_back(1.0 + l);
  if (j.contains("k")) {
    if (!j["k"].is_number_integer() || j["k"].get<int>() < 0) config_error("field 'k': expected a nonnegative integer");
    q.k = j["k"].get<int>();
  }
  if (j.contains("require_distant")) {
    if (!j["require_distant"].is_boolean()) config_error("field 'require_distant': expected a boolean");
    q.require_distant = j["require_distant"].get<bool>();
  }
  // default theta: the leading spike direction, or any unit bulk vector
  q.theta.norm2 = 1.0;
  q.theta.spike_projections.assign(q.spikes.size(), 0.0);
  if (!q.spikes.empty()) q.theta.spike_projections[0] = 1.0;
  if (j.contains("theta")) {
    const json& t = j["theta"];
    if (!t.is_object()) config_error("field 'theta': expected an object");
    if (t.contains("random")) {
      if (!t["random"].is_boolean()) config_error("field 'theta.random': expected a boolean");
      q.theta.random = t["random"].get<bool>();
    }
    q.theta.variance = number(t, "variance", 1.0);
    q.theta.norm2 = number(t, "norm2", 1.0);
    if (t.contains("projections")) {
      q.theta.spike_projections = numbers(t, "projections");
      if (q.theta.spike_projections.size() != q.spikes.size())
        config_error("field 'theta.projections': need one entry per spike");
    }
  }
  try {
    q.law.validate();
  } catch (const Error& e) {
    config_error(std::string("bulk law: ") + e.what());
  }
  return q;
}

template <typename F>
auto as_config_error(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error(std::string(to_string(e.code())) + ": " + e.what());
  }
}

}  // namespace

json limits_json(const json& query) {
  const Query q = parse_query(query, {});
  return as_config_error([&] {
    json out;
    out["gamma"] = q.law.gamma;
    json atoms = json::array();
    for (const auto& a : q.law.atoms) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
    out["bulk"] = atoms;
    const rmt::Moments mom = rmt::mp_moments(q.law);
    out["m1"] = mom.m1;
    out["m2"] = mom.m2;
    json spikes = json::array();
    for (std::size_t j = 0; j < q.spikes.size(); ++j) {
      const double ell = q.spikes[j];
      const bool distant = rmt::classify_spike(ell, q.law) == rmt::SpikeClass::Distant;
      if (q.require_distant && !distant)
        config_error("spike " + std::to_string(j + 1) + " (eigenvalue " + format_number(ell) +
                     ") is close, not distant; set require_distant=false to query it");
      json s;
      s["eigenvalue"] = ell;
      s["class"] = distant ? "distant" : "close";
      s["psi"] = rmt::psi(ell, q.law);
      s["psi_prime"] = rmt::psi_prime(ell, q.law);
      s["xi1"] = distant ? json(rmt::xi(1, ell, q.law)) : json(nullptr);
      s["xi2"] = distant ? json(rmt::xi(2, ell, q.law)) : json(nullptr);
      s["phi1"] = rmt::phi(1, ell, q.law);
      s["phi2"] = rmt::phi(2, ell, q.law);
      spikes.push_back(s);
    }
    out["spikes"] = spikes;
    json bulk_phi = json::array();
    for (const auto& a : q.law.atoms)
      bulk_phi.push_back({{"value", a.value}, {"phi1", rmt::phi_bulk(1, a.value, q.law)},
                          {"phi2", rmt::phi_bulk(2, a.value, q.law)}});
    out["phi_bulk"] = bulk_phi;
    const rmt::ScenarioConstants sc = rmt::scenario_constants(q.spikes, q.law, q.theta, q.k);
    out["k"] = q.k;
    out["c0"] = sc.c0;
    out["c4"] = sc.c4;
    out["c0_printed"] = sc.c0_printed ? json(*sc.c0_printed) : json(nullptr);
    out["c4_printed"] = sc.c4_printed ? json(*sc.c4_printed) : json(nullptr);
    return out;
  });
}

std::string power_csv(const json& query, const std::vector<double>& h_grid) {
  const Query q = parse_query(query, {"scenario", "alpha", "sigma_beta", "sigma_theta", "sigma_g", "c1"});
  if (!query.contains("scenario") || !query["scenario"].is_string()) config_error("field 'scenario': required string");
  const std::string name = query["scenario"].get<std::string>();
  if (name == "fixed_fixed" || name == "both_fixed")
    config_error("scenario '" + name +
                 "' has no closed-form limit law (only a divergence result); use 'simulate' for this case");
  if (h_grid.empty()) config_error("h grid is empty");
  return as_config_error([&] {
    const rmt::Scenario scenario = rmt::parse_scenario(name);
    const double alpha = number(query, "alpha", 0.05);
    const double t = dist::chi1_upper_quantile(alpha);
    const rmt::Moments mom = rmt::mp_moments(q.law);
    rmt::LawParams p;
    const double sb = number(query, "sigma_beta", 1.0), st = number(query, "sigma_theta", 1.0),
                 sg = number(query, "sigma_g", 1.0);
    p.sigma2_beta = sb * sb;
    p.sigma2_theta = st * st;
    p.sigma2_g = sg * sg;
    p.m1 = mom.m1;
    p.m2 = mom.m2;
    p.gamma = q.law.gamma;
    if (query.contains("c1")) p.c1 = number(query, "c1", 0.0);
    if (scenario == rmt::Scenario::BetaRandomThetaFixed) {
      rmt::ThetaSpec theta = q.theta;
      theta.random = false;
      const auto sc = rmt::scenario_constants(q.spikes, q.law, theta, q.k);
      p.c0 = sc.c0;
      p.c4 = sc.c4;
    }
    if (scenario == rmt::Scenario::BetaFixedThetaRandom && !p.c1)
      config_error("scenario 'beta_fixed_theta_random': the constant C1 has no closed form (it is estimated "
                   "empirically from simulations); supply it as 'c1'");
    std::string out = "h,t,upsilon\n";
    for (double h : h_grid) {
      p.h = h;
      const double u = rmt::asymptotic_power(t, rmt::kappa2_limit_law(scenario, p));
      out += format_number(h) + ',' + format_number(t) + ',' + format_number(u) + '\n';
    }
    return out;
  });
}

}  // namespace pcrlab::experiments
