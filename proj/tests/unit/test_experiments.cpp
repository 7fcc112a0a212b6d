#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "doctest.h"
#include "experiments/config.hpp"
#include "experiments/engine.hpp"
#include "experiments/output.hpp"
#include "experiments/queries.hpp"
#include "experiments/reproduce.hpp"
#include "experiments/selftest.hpp"

using namespace pcrlab;
using namespace pcrlab::experiments;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.n = 40;
  c.p = 60;
  c.reps = 30;
  c.tau0_grid = {0.0, 0.5, 1.0};
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("config defaults and round trip") {
  const ExperimentConfig c = config_from_text("{}");
  CHECK(c.tau0_grid.size() == 21);
  CHECK(c.gamma() == doctest::Approx(2.0));
  const json dumped = config_to_json(c);
  const ExperimentConfig back = config_from_json(dumped);
  CHECK(config_to_json(back).dump() == dumped.dump());
}

TEST_CASE("config diagnostics name the field") {
  CHECK(code_of([] { config_from_text("{\"n\": 10,"); }) == ErrorCode::ConfigError);
  CHECK(message_of([] { config_from_text("{\n\"n\": 10,\n"); }).find("line") != std::string::npos);
  CHECK(message_of([] { config_from_text("{\"bogus\": 1}"); }).find("'bogus'") != std::string::npos);
  CHECK(message_of([] { config_from_text("{\"alpha\": 2}"); }).find("'alpha'") != std::string::npos);
  CHECK(message_of([] { config_from_text("{\"model\": \"x\"}"); }).find("'model'") != std::string::npos);
  CHECK(message_of([] { config_from_text("{\"n\": 1.5}"); }).find("'n'") != std::string::npos);
  CHECK(message_of([] { config_from_text("{\"n\": 10, \"p\": 10, \"k\": 10}"); }).find("'k'") != std::string::npos);
  CHECK(code_of([] { config_from_text("{\"variant\": \"in\", \"theta_mode\": \"fixed\"}"); }) == ErrorCode::ConfigError);
}

TEST_CASE("mode combinations") {
  ExperimentConfig c = tiny();
  CHECK(mode_combos(c).size() == 4);
  c.beta_mode = Mode::Random;
  CHECK(mode_combos(c).size() == 2);
  c.variant = pcr::Variant::In;
  c.beta_mode.reset();
  const auto in = mode_combos(c);
  REQUIRE(in.size() == 2);
  CHECK(!in[0].theta);
}

TEST_CASE("csv has the frozen header and one row per tau0 and mode") {
  const auto r = run_experiment(tiny(), 2);
  const std::string csv = to_csv(r);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(std::string(kCsvHeader) ==
        "variant,model,exposure,n,p,k,alpha,tau0,beta_mode,theta_mode,h,reps,degenerate,rejections,rate,mc_se,"
        "theory_rate,seed");
  CHECK(count_lines(csv) == 1 + 3 * 4);
  CHECK(csv.find('\r') == std::string::npos);
  for (const auto& row : r.rows) {
    CHECK(row.rejections <= row.reps - row.degenerate);
    CHECK(row.rate == doctest::Approx(static_cast<double>(row.rejections) / (row.reps - row.degenerate)));
  }
}

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig c = tiny();
  c.model = Model::BinomMixture;
  c.exposure = Exposure::Binomial;
  const std::string one = to_csv(run_experiment(c, 1));
  CHECK(one == to_csv(run_experiment(c, 4)));
  c.master_seed += 1;
  CHECK(one != to_csv(run_experiment(c, 1)));
}

TEST_CASE("in-regression experiment runs") {
  ExperimentConfig c = tiny();
  c.variant = pcr::Variant::In;
  const std::string csv = to_csv(run_experiment(c, 1));
  CHECK(count_lines(csv) == 1 + 3 * 2);
  CHECK(csv.find("in,spiked,linear,40,60,1,0.05,0,fixed,none") != std::string::npos);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.05) == "0.05");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(format_number(std::nan("")) == "NA");
}

TEST_CASE("git blob hash") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("manifest records config and seed") {
  const auto r = run_experiment(tiny(), 1);
  const json m = manifest(r);
  CHECK(m["master_seed"] == tiny().master_seed);
  CHECK(m["config"]["n"] == 40);
  CHECK(m["config_sha1"].get<std::string>().size() == 40);
}

TEST_CASE("limits query") {
  const json out = limits_json(json::parse(R"({"gamma": 1, "lambdas": [4]})"));
  CHECK(out["spikes"][0]["psi"].get<double>() == doctest::Approx(5.0 * 1.25));
  CHECK(out["spikes"][0]["class"] == "distant");
  CHECK(out["phi_bulk"][0]["phi1"].get<double>() == doctest::Approx(1.0));
  const json bulk = limits_json(json::parse(R"({"gamma": 0.5})"));
  CHECK(bulk["m1"].get<double>() == doctest::Approx(1.0));
  CHECK(bulk["m2"].get<double>() == doctest::Approx(1.5));
  CHECK(code_of([] { limits_json(json::parse(R"({"gamma": 2, "lambdas": [1]})")); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { limits_json(json::parse(R"({"lambdas": [4]})")); }) == ErrorCode::ConfigError);
  // deterministic key order
  CHECK(limits_json(json::parse(R"({"gamma": 2, "lambdas": [4]})")).dump() ==
        limits_json(json::parse(R"({"lambdas": [4], "gamma": 2})")).dump());
}

TEST_CASE("power curve") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.25 * i);
  const std::string csv =
      power_csv(json::parse(R"({"gamma": 2, "lambdas": [4], "scenario": "beta_random_theta_fixed"})"), grid);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "h,t,upsilon");
  double prev = 0.0, last = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    const double u = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(u >= prev - 1e-12);
    prev = last = u;
    ++rows;
  }
  CHECK(rows == 41);
  CHECK(last > 0.999);
  CHECK(code_of([&] { power_csv(json::parse(R"({"gamma": 2, "scenario": "fixed_fixed"})"), grid); }) ==
        ErrorCode::ConfigError);
  CHECK(message_of([&] { power_csv(json::parse(R"({"gamma": 2, "scenario": "beta_fixed_theta_random"})"), grid); })
            .find("C1") != std::string::npos);
}

TEST_CASE("figure panels") {
  const auto f1 = figure_panels("fig1", "paper", 1);
  CHECK(f1.size() == 6);
  CHECK(f1[0].config.p == 1000);
  const auto f2 = figure_panels("fig2", "desk", 1);
  REQUIRE(f2.size() == 2);
  for (const auto& panel : f2) {
    CHECK(panel.config.tau0_grid.size() == 21);
    CHECK(mode_combos(panel.config).size() == 2);
  }
  CHECK(code_of([] { figure_panels("fig3", "desk", 1); }) == ErrorCode::ConfigError);
}

TEST_CASE("reproduce reports unwritable output as an IO error") {
  CHECK(code_of([] { reproduce("fig2", "desk", "/proc/forbidden/out", 1, 1); }) == ErrorCode::IoError);
}

TEST_CASE("KS helpers") {
  std::vector<double> uniform;
  for (int i = 0; i < 1000; ++i) uniform.push_back((i + 0.5) / 1000.0);
  CHECK(ks_distance(uniform, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.0005));
  CHECK(ks_critical(0.01, 100) == doctest::Approx(0.16276));
}
