#include "pcrlab/pcrlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "core/distributions.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "experiments/engine.hpp"
#include "experiments/output.hpp"
#include "experiments/queries.hpp"
#include "experiments/reproduce.hpp"
#include "experiments/selftest.hpp"
#include "pcr/test.hpp"

struct pcrlab_matrix {
  pcrlab::linalg::Matrix m;
};

struct pcrlab_experiment {
  pcrlab::experiments::ExperimentConfig config;
  std::optional<pcrlab::experiments::ExperimentResult> result;
};

namespace {

thread_local std::string g_last_error;

pcrlab_status status_of(pcrlab::ErrorCode c) { return static_cast<pcrlab_status>(static_cast<int>(c)); }

template <typename F>
pcrlab_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return PCRLAB_OK;
  } catch (const pcrlab::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PCRLAB_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PCRLAB_INTERNAL_ERROR;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw pcrlab::Error(pcrlab::ErrorCode::InvalidInput, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

pcrlab::linalg::Vector view(const double* data, Eigen::Index n) {
  return Eigen::Map<const pcrlab::linalg::Vector>(data, n);
}

pcrlab::pcr::Variant variant_of(pcrlab_variant v) {
  require(v == PCRLAB_VARIANT_OUT || v == PCRLAB_VARIANT_IN, "unknown variant");
  return v == PCRLAB_VARIANT_IN ? pcrlab::pcr::Variant::In : pcrlab::pcr::Variant::Out;
}

nlohmann::json parse_query(const char* text) {
  require(text != nullptr, "null query");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw pcrlab::Error(pcrlab::ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* pcrlab_last_error(void) { return g_last_error.c_str(); }

const char* pcrlab_status_name(pcrlab_status status) {
  if (status == PCRLAB_OK) return "Ok";
  if (status == PCRLAB_INTERNAL_ERROR) return "InternalError";
  if (status >= PCRLAB_INVALID_INPUT && status <= PCRLAB_IO_ERROR)
    return pcrlab::to_string(static_cast<pcrlab::ErrorCode>(static_cast<int>(status)));
  return "Unknown";
}

const char* pcrlab_version(void) { return "0.1.0"; }

void pcrlab_string_free(char* s) { std::free(s); }

pcrlab_status pcrlab_matrix_create(size_t rows, size_t cols, const double* row_major, pcrlab_matrix** out) {
  return guard([&] {
    require(out != nullptr && row_major != nullptr, "null argument");
    require(rows >= 1 && cols >= 1, "matrix needs at least one row and one column");
    auto* m = new pcrlab_matrix;
    m->m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        row_major, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (!m->m.allFinite()) {
      delete m;
      throw pcrlab::Error(pcrlab::ErrorCode::InvalidInput, "matrix entries must be finite");
    }
    *out = m;
  });
}

pcrlab_status pcrlab_matrix_shape(const pcrlab_matrix* m, size_t* rows, size_t* cols) {
  return guard([&] {
    require(m && rows && cols, "null argument");
    *rows = static_cast<size_t>(m->m.rows());
    *cols = static_cast<size_t>(m->m.cols());
  });
}

void pcrlab_matrix_destroy(pcrlab_matrix* m) { delete m; }

pcrlab_status pcrlab_chi1_upper_quantile(double alpha, double* out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = pcrlab::dist::chi1_upper_quantile(alpha);
  });
}

pcrlab_status pcrlab_noncentral_chi1_sf(double t, double ncp, double* out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = pcrlab::dist::noncentral_chi1_sf(t, ncp);
  });
}

pcrlab_status pcrlab_lr(const double* y, const double* a, const pcrlab_matrix* w, size_t k, pcrlab_variant variant,
                        double* out) {
  return guard([&] {
    require(y && a && w && out, "null argument");
    const auto n = w->m.rows();
    const auto kk = static_cast<Eigen::Index>(k);
    *out = variant_of(variant) == pcrlab::pcr::Variant::Out ? pcrlab::pcr::lr_out(view(y, n), view(a, n), w->m, kk)
                                                           : pcrlab::pcr::lr_in(view(y, n), view(a, n), w->m, kk);
  });
}

pcrlab_status pcrlab_kappa2(const double* a, const pcrlab_matrix* w, const double* beta, double delta, size_t k,
                            pcrlab_variant variant, double* out) {
  return guard([&] {
    require(a && w && beta && out, "null argument");
    *out = pcrlab::pcr::kappa2(view(a, w->m.rows()), w->m, view(beta, w->m.cols()), delta,
                               static_cast<Eigen::Index>(k), variant_of(variant));
  });
}

pcrlab_status pcrlab_run_test(const double* y, const double* a, const pcrlab_matrix* w, size_t k,
                              pcrlab_variant variant, double alpha, pcrlab_test_outcome* out) {
  return guard([&] {
    require(y && a && w && out, "null argument");
    const auto n = w->m.rows();
    const auto r = pcrlab::pcr::run_test(view(y, n), view(a, n), w->m, static_cast<Eigen::Index>(k),
                                         variant_of(variant), alpha);
    out->statistic = r.statistic;
    out->cutoff = r.cutoff;
    out->reject = r.reject ? 1 : 0;
    out->k = static_cast<size_t>(r.k);
    out->variant = variant;
  });
}

pcrlab_status pcrlab_limits_json(const char* query_json, char** out_json) {
  return guard([&] {
    require(out_json != nullptr, "null output");
    *out_json = dup_string(pcrlab::experiments::limits_json(parse_query(query_json)).dump(2) + "\n");
  });
}

pcrlab_status pcrlab_power_csv(const char* query_json, const double* h_grid, size_t n_h, char** out_csv) {
  return guard([&] {
    require(out_csv != nullptr && (h_grid != nullptr || n_h == 0), "null argument");
    const std::vector<double> grid(h_grid, h_grid + n_h);
    *out_csv = dup_string(pcrlab::experiments::power_csv(parse_query(query_json), grid));
  });
}

pcrlab_status pcrlab_experiment_create(const char* config_json, pcrlab_experiment** out) {
  return guard([&] {
    require(config_json && out, "null argument");
    auto cfg = pcrlab::experiments::config_from_text(config_json);
    *out = new pcrlab_experiment{std::move(cfg), std::nullopt};
  });
}

pcrlab_status pcrlab_experiment_set_seed(pcrlab_experiment* e, uint64_t seed) {
  return guard([&] {
    require(e != nullptr, "null experiment");
    e->config.master_seed = seed;
    e->result.reset();
  });
}

pcrlab_status pcrlab_experiment_run(pcrlab_experiment* e, unsigned threads) {
  return guard([&] {
    require(e != nullptr, "null experiment");
    e->result = pcrlab::experiments::run_experiment(e->config, threads == 0 ? 1 : threads);
  });
}

pcrlab_status pcrlab_experiment_csv(const pcrlab_experiment* e, char** out_csv) {
  return guard([&] {
    require(e && out_csv, "null argument");
    if (!e->result) throw pcrlab::Error(pcrlab::ErrorCode::NotAvailable, "experiment has not been run");
    *out_csv = dup_string(pcrlab::experiments::to_csv(*e->result));
  });
}

pcrlab_status pcrlab_experiment_manifest(const pcrlab_experiment* e, char** out_json) {
  return guard([&] {
    require(e && out_json, "null argument");
    if (!e->result) throw pcrlab::Error(pcrlab::ErrorCode::NotAvailable, "experiment has not been run");
    *out_json = dup_string(pcrlab::experiments::manifest(*e->result).dump(2) + "\n");
  });
}

void pcrlab_experiment_destroy(pcrlab_experiment* e) { delete e; }

pcrlab_status pcrlab_reproduce(const char* figure, const char* scale, const char* out_dir, uint64_t seed,
                               unsigned threads, char** out_manifest) {
  return guard([&] {
    require(figure && scale && out_dir, "null argument");
    const auto m = pcrlab::experiments::reproduce(figure, scale, out_dir, seed, threads == 0 ? 1 : threads);
    if (out_manifest) *out_manifest = dup_string(m.dump(2) + "\n");
  });
}

uint64_t pcrlab_default_seed(void) { return pcrlab::experiments::kDefaultReproduceSeed; }

pcrlab_status pcrlab_selftest(char** out_report, int* all_passed) {
  return guard([&] {
    require(out_report && all_passed, "null argument");
    std::string report;
    bool ok = true;
    for (const auto& c : pcrlab::experiments::selftest()) {
      ok = ok && c.passed;
      report += (c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
    }
    *out_report = dup_string(report);
    *all_passed = ok ? 1 : 0;
  });
}

void pcrlab_testing_inject_seed_fault(int enabled) { pcrlab::rng::set_seed_fault(enabled != 0); }

}  // extern "C"
