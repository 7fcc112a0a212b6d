// pcrlab command-line front end. Talks to the library only through the C API.
#include <pcrlab/pcrlab.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelftest = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
};

struct CliFailure {
  int code;
  std::string message;
};

struct CString {
  char* p = nullptr;
  ~CString() { pcrlab_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int exit_code_for(pcrlab_status s) {
  switch (s) {
    case PCRLAB_OK: return kExitOk;
    case PCRLAB_IO_ERROR: return kExitIo;
    default: return kExitConfig;
  }
}

void check(pcrlab_status s, const std::string& context) {
  if (s != PCRLAB_OK)
    throw CliFailure{exit_code_for(s), context + ": " + pcrlab_status_name(s) + ": " + pcrlab_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure{kExitIo, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a temporary sibling first so a failed run leaves no partial file.
void write_file(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliFailure{kExitIo, "cannot write '" + path + "'"};
    out << body;
    out.flush();
    if (!out) throw CliFailure{kExitIo, "write failed for '" + path + "'"};
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw CliFailure{kExitIo, "cannot move output into '" + path + "'"};
  }
}

void emit(const std::string& out_path, const std::string& body) {
  if (out_path.empty() || out_path == "-")
    std::cout << body << std::flush;
  else
    write_file(out_path, body);
}

unsigned resolve_threads(const Options& o) {
  if (o.threads > 0) return o.threads;
  if (const char* env = std::getenv("PCRLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  return 1;
}

void log(const Options& o, const std::string& msg) {
  if (o.verbosity > 0) std::cerr << "pcrlab: " << msg << "\n";
}

int cmd_simulate(const Options& o, const std::string& config, const std::string& out, const std::string& manifest) {
  const std::string text = read_file(config);
  pcrlab_experiment* raw = nullptr;
  check(pcrlab_experiment_create(text.c_str(), &raw), "config '" + config + "'");
  std::unique_ptr<pcrlab_experiment, decltype(&pcrlab_experiment_destroy)> exp(raw, pcrlab_experiment_destroy);
  if (o.seed) check(pcrlab_experiment_set_seed(exp.get(), *o.seed), "seed");
  const unsigned threads = resolve_threads(o);
  log(o, "running with " + std::to_string(threads) + " thread(s)");
  check(pcrlab_experiment_run(exp.get(), threads), "simulate");
  CString csv, man;
  check(pcrlab_experiment_csv(exp.get(), &csv.p), "csv");
  check(pcrlab_experiment_manifest(exp.get(), &man.p), "manifest");
  emit(out, csv.str());
  std::string manifest_path = manifest;
  if (manifest_path.empty() && !out.empty() && out != "-") manifest_path = out + ".manifest.json";
  if (!manifest_path.empty()) write_file(manifest_path, man.str());
  return kExitOk;
}

int cmd_limits(const std::string& config, const std::string& out) {
  const std::string text = read_file(config);
  CString json;
  check(pcrlab_limits_json(text.c_str(), &json.p), "limits '" + config + "'");
  emit(out, json.str());
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliFailure{kExitConfig, "--h-grid: cannot parse '" + item + "'"};
    }
  }
  return grid;
}

int cmd_power(const std::string& config, const std::string& h_grid, const std::string& out) {
  const std::string text = read_file(config);
  const std::vector<double> grid = parse_grid(h_grid);
  CString csv;
  check(pcrlab_power_csv(text.c_str(), grid.data(), grid.size(), &csv.p), "power '" + config + "'");
  emit(out, csv.str());
  return kExitOk;
}

int cmd_reproduce(const Options& o, const std::string& figure, const std::string& scale, const std::string& out) {
  const std::uint64_t seed = o.seed ? *o.seed : pcrlab_default_seed();
  const unsigned threads = resolve_threads(o);
  log(o, "reproducing " + figure + " (" + scale + ") into " + out);
  check(pcrlab_reproduce(figure.c_str(), scale.c_str(), out.c_str(), seed, threads, nullptr), "reproduce");
  return kExitOk;
}

int cmd_selftest(bool inject_fault) {
  if (inject_fault) pcrlab_testing_inject_seed_fault(1);
  CString report;
  int passed = 0;
  const pcrlab_status s = pcrlab_selftest(&report.p, &passed);
  if (s != PCRLAB_OK) {
    std::cerr << "selftest: " << pcrlab_status_name(s) << ": " << pcrlab_last_error() << "\n";
    return kExitSelftest;
  }
  std::cout << report.str();
  std::cout << (passed ? "selftest: all checks passed\n" : "selftest: FAILED\n");
  return passed ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Type I error of PC-adjusted association tests: simulation and limit theory"};
  app.set_version_flag("--version", std::string(pcrlab_version()));
  app.require_subcommand(1, 1);
  app.fallthrough();

  Options opts;
  app.add_option("--threads", opts.threads, "Worker threads (falls back to PCRLAB_THREADS, then 1)")
      ->check(CLI::Range(1u, 1024u));
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the master seed");
  app.add_flag("-v,--verbose", opts.verbosity, "Progress messages on stderr");

  std::string config, out, manifest, h_grid = "0,0.5,1,1.5,2,2.5,3,3.5,4,4.5,5";
  std::string figure, scale = "desk";
  bool inject_fault = false;

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
  sim->add_option("--config", config, "Experiment config (JSON)")->required();
  sim->add_option("--out", out, "Results CSV (default stdout)");
  sim->add_option("--manifest", manifest, "Manifest JSON (default <out>.manifest.json)");

  auto* lim = app.add_subcommand("limits", "Limit coefficients for an atomic spectral law");
  lim->add_option("--config", config, "Query (JSON)")->required();
  lim->add_option("--out", out, "Output JSON (default stdout)");

  auto* pow = app.add_subcommand("power", "Asymptotic out-regression rejection curve over h");
  pow->add_option("--config", config, "Scenario (JSON)")->required();
  pow->add_option("--h-grid", h_grid, "Comma-separated h values");
  pow->add_option("--out", out, "Output CSV (default stdout)");

  auto* rep = app.add_subcommand("reproduce", "Regenerate the simulation panels of a figure");
  rep->add_option("figure", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
  rep->add_option("--scale", scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  rep->add_option("--out", out, "Output directory")->required();

  auto* st = app.add_subcommand("selftest", "Fast invariant checks");
  st->add_flag("--inject-seed-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (*seed_opt) opts.seed = seed;

  try {
    if (*sim) return cmd_simulate(opts, config, out, manifest);
    if (*lim) return cmd_limits(config, out);
    if (*pow) return cmd_power(config, h_grid, out);
    if (*rep) return cmd_reproduce(opts, figure, scale, out);
    if (*st) return cmd_selftest(inject_fault);
  } catch (const CliFailure& f) {
    std::cerr << "pcrlab: " << f.message << "\n";
    return f.code;
  }
  return kExitConfig;
}
