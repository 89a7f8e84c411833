/* C interface to the multilevel Monte Carlo engine.
 *
 * All functions return a cmlmc_status. On failure a message for the calling
 * thread is available from cmlmc_last_error(). Strings returned through out
 * parameters are owned by the caller and released with cmlmc_string_free().
 * Configuration and parameters are passed as JSON text.
 */
#ifndef CMLMC_CMLMC_H
#define CMLMC_CMLMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CMLMC_BUILDING_LIBRARY)
#    define CMLMC_API __declspec(dllexport)
#  else
#    define CMLMC_API __declspec(dllimport)
#  endif
#else
#  define CMLMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmlmc_status {
  CMLMC_OK = 0,
  CMLMC_ERR_INVALID_ARGUMENT = 1,
  CMLMC_ERR_CONFIG = 2,
  CMLMC_ERR_SAMPLING_FAILURE = 3,
  CMLMC_ERR_INSUFFICIENT_SAMPLES = 4,
  CMLMC_ERR_INVALID_SPLIT = 5,
  CMLMC_ERR_CALIBRATION_UNAVAILABLE = 6,
  CMLMC_ERR_TOLERANCE_UNREACHABLE = 7,
  CMLMC_ERR_ESTIMATE_UNDEFINED = 8,
  CMLMC_ERR_ITERATION_LIMIT = 9,
  CMLMC_ERR_IO = 10,
  CMLMC_ERR_RUNS_FAILED = 11,
  CMLMC_ERR_INTERNAL = 12
} cmlmc_status;

typedef struct cmlmc_sampler cmlmc_sampler;
typedef struct cmlmc_record cmlmc_record;

CMLMC_API const char* cmlmc_version(void);
CMLMC_API const char* cmlmc_status_string(cmlmc_status status);
/* Message of the last failed call on this thread, "" if none. */
CMLMC_API const char* cmlmc_last_error(void);
CMLMC_API void cmlmc_string_free(char* s);

/* spec_json: {"name": "gbm"|"synthetic"|"elliptic1d", "params": {...}} */
CMLMC_API cmlmc_status cmlmc_sampler_create(const char* spec_json, cmlmc_sampler** out);
CMLMC_API void cmlmc_sampler_destroy(cmlmc_sampler* s);
/* One coupled sample G_level for stream (seed, level, index). cost is the model work. */
CMLMC_API cmlmc_status cmlmc_sampler_sample(const cmlmc_sampler* s, int level, uint64_t seed,
                                            uint64_t index, double* g, double* cost);
/* Known E[g]; has_reference is set to 0 when none is available. */
CMLMC_API cmlmc_status cmlmc_sampler_reference(const cmlmc_sampler* s, int* has_reference,
                                               double* reference);
/* Descriptor as JSON: name, nominal rates, hierarchy, complexity exponents. */
CMLMC_API cmlmc_status cmlmc_sampler_describe(const cmlmc_sampler* s, char** json_out);

/* algorithm_json carries "type" ("cmlmc"|"smlmc"), "tol" and the algorithm
 * fields accepted by the experiment config. A run that fails after
 * validation still yields a record whose status names the failure. */
CMLMC_API cmlmc_status cmlmc_run(const cmlmc_sampler* s, const char* algorithm_json,
                                 uint64_t seed, int threads, cmlmc_record** out);
CMLMC_API void cmlmc_record_destroy(cmlmc_record* r);
CMLMC_API cmlmc_status cmlmc_record_status(const cmlmc_record* r);
CMLMC_API double cmlmc_record_estimate(const cmlmc_record* r);
CMLMC_API double cmlmc_record_error_estimate(const cmlmc_record* r);
CMLMC_API double cmlmc_record_model_work(const cmlmc_record* r);
CMLMC_API int cmlmc_record_final_level(const cmlmc_record* r);
CMLMC_API double cmlmc_record_theta(const cmlmc_record* r);
CMLMC_API size_t cmlmc_record_iterations(const cmlmc_record* r);
CMLMC_API cmlmc_status cmlmc_record_to_json(const cmlmc_record* r, int include_timing,
                                            char** json_out);

/* Harness. reuse_samples: -1 keeps the config value, 0 off, 1 on. */
typedef struct cmlmc_run_options {
  const char* out_dir; /* NULL keeps the config value */
  int threads;
  int has_seed;
  uint64_t seed;
  int reuse_samples;
} cmlmc_run_options;

CMLMC_API void cmlmc_run_options_init(cmlmc_run_options* opt);
/* Validates and returns the normalised config in normalized_out (may be NULL). */
CMLMC_API cmlmc_status cmlmc_config_validate(const char* config_json, char** normalized_out);
/* Runs the ensemble and writes outputs. Returns CMLMC_ERR_RUNS_FAILED when
 * some runs failed; the manifest is still written. */
CMLMC_API cmlmc_status cmlmc_experiment_run(const char* config_json, const cmlmc_run_options* opt,
                                            char** manifest_out);
CMLMC_API cmlmc_status cmlmc_compare(const char* const* manifest_paths, size_t n,
                                     const char* out_dir, char** result_out);
CMLMC_API cmlmc_status cmlmc_diag(const char* manifest_path, const char* out_dir,
                                  char** result_out);

#ifdef __cplusplus
}
#endif

#endif /* CMLMC_CMLMC_H */
