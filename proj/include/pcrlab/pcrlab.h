#ifndef PCRLAB_PCRLAB_H
#define PCRLAB_PCRLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PCRLAB_API __declspec(dllexport)
#else
#define PCRLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pcrlab_status {
  PCRLAB_OK = 0,
  PCRLAB_INVALID_INPUT = 1,
  PCRLAB_RANK_ERROR = 2,
  PCRLAB_DEGENERATE_EXPOSURE = 3,
  PCRLAB_INVALID_SPEC = 4,
  PCRLAB_SINGULARITY = 5,
  PCRLAB_NOT_APPLICABLE = 6,
  PCRLAB_NOT_AVAILABLE = 7,
  PCRLAB_CONFIG_ERROR = 8,
  PCRLAB_IO_ERROR = 9,
  PCRLAB_INTERNAL_ERROR = 99
} pcrlab_status;

typedef enum pcrlab_variant { PCRLAB_VARIANT_OUT = 0, PCRLAB_VARIANT_IN = 1 } pcrlab_variant;

/* Message for the most recent failure on the calling thread. */
PCRLAB_API const char* pcrlab_last_error(void);
PCRLAB_API const char* pcrlab_status_name(pcrlab_status status);
PCRLAB_API const char* pcrlab_version(void);

/* Every char* handed out by the library is released with this. */
PCRLAB_API void pcrlab_string_free(char* s);

typedef struct pcrlab_matrix pcrlab_matrix;

PCRLAB_API pcrlab_status pcrlab_matrix_create(size_t rows, size_t cols, const double* row_major, pcrlab_matrix** out);
PCRLAB_API pcrlab_status pcrlab_matrix_shape(const pcrlab_matrix* m, size_t* rows, size_t* cols);
PCRLAB_API void pcrlab_matrix_destroy(pcrlab_matrix* m);

PCRLAB_API pcrlab_status pcrlab_chi1_upper_quantile(double alpha, double* out);
PCRLAB_API pcrlab_status pcrlab_noncentral_chi1_sf(double t, double ncp, double* out);

typedef struct pcrlab_test_outcome {
  double statistic;
  double cutoff;
  int reject;
  size_t k;
  pcrlab_variant variant;
} pcrlab_test_outcome;

/* y and a have w's row count; w is n x p. */
PCRLAB_API pcrlab_status pcrlab_lr(const double* y, const double* a, const pcrlab_matrix* w, size_t k,
                                   pcrlab_variant variant, double* out);
PCRLAB_API pcrlab_status pcrlab_kappa2(const double* a, const pcrlab_matrix* w, const double* beta, double delta,
                                       size_t k, pcrlab_variant variant, double* out);
PCRLAB_API pcrlab_status pcrlab_run_test(const double* y, const double* a, const pcrlab_matrix* w, size_t k,
                                         pcrlab_variant variant, double alpha, pcrlab_test_outcome* out);

/* JSON query in, JSON / CSV text out. */
PCRLAB_API pcrlab_status pcrlab_limits_json(const char* query_json, char** out_json);
PCRLAB_API pcrlab_status pcrlab_power_csv(const char* query_json, const double* h_grid, size_t n_h, char** out_csv);

typedef struct pcrlab_experiment pcrlab_experiment;

PCRLAB_API pcrlab_status pcrlab_experiment_create(const char* config_json, pcrlab_experiment** out);
PCRLAB_API pcrlab_status pcrlab_experiment_set_seed(pcrlab_experiment* e, uint64_t seed);
PCRLAB_API pcrlab_status pcrlab_experiment_run(pcrlab_experiment* e, unsigned threads);
PCRLAB_API pcrlab_status pcrlab_experiment_csv(const pcrlab_experiment* e, char** out_csv);
PCRLAB_API pcrlab_status pcrlab_experiment_manifest(const pcrlab_experiment* e, char** out_json);
PCRLAB_API void pcrlab_experiment_destroy(pcrlab_experiment* e);

/* Writes one CSV per panel and manifest.json into out_dir. */
PCRLAB_API pcrlab_status pcrlab_reproduce(const char* figure, const char* scale, const char* out_dir, uint64_t seed,
                                          unsigned threads, char** out_manifest);
PCRLAB_API uint64_t pcrlab_default_seed(void);

/* Report is one "PASS|FAIL name: detail" line per check. */
PCRLAB_API pcrlab_status pcrlab_selftest(char** out_report, int* all_passed);

/* Negative control for the determinism check. Not for production use. */
PCRLAB_API void pcrlab_testing_inject_seed_fault(int enabled);

#ifdef __cplusplus
}
#endif

#endif
