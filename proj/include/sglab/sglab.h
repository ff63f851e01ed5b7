#ifndef SGLAB_SGLAB_H
#define SGLAB_SGLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(SGLAB_BUILD)
#define SGLAB_API __attribute__((visibility("default")))
#else
#define SGLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sglab_status {
  SGLAB_OK = 0,
  SGLAB_INVALID_ARGUMENT = 1,
  SGLAB_CONFIG = 2,
  SGLAB_NUMERIC = 3,
  SGLAB_LIMIT = 4,
  SGLAB_INTERNAL = 5
} sglab_status;

typedef struct sglab_run sglab_run;

typedef struct sglab_row {
  const char* experiment;
  const char* quantity;
  const char* digest;
  double value;
  double se;
  double bias;
  int64_t n_samples;
  uint64_t seed;
  int pass; /* -1 none, 0 fail, 1 pass */
  double wall_time;
} sglab_row;

typedef void (*sglab_progress_fn)(const char* line, void* user);

/* Last error on this thread. Strings stay valid until the next call that fails. */
SGLAB_API const char* sglab_last_error(void);
SGLAB_API const char* sglab_last_error_location(void);

SGLAB_API const char* sglab_version(void);

/* Experiment catalog. params_json is a JSON array of parameter names. */
SGLAB_API size_t sglab_experiment_count(void);
SGLAB_API const char* sglab_experiment_name(size_t i);
SGLAB_API const char* sglab_experiment_summary(size_t i);
SGLAB_API const char* sglab_experiment_params(size_t i);

/* config_json is the full config document; it is validated here. */
SGLAB_API sglab_status sglab_run_create(const char* config_json, sglab_run** out);
SGLAB_API void sglab_run_destroy(sglab_run* run);

/* threads < 0 keeps mc.threads from the config */
SGLAB_API sglab_status sglab_run_execute(sglab_run* run, int threads, sglab_progress_fn progress, void* user);

SGLAB_API size_t sglab_run_row_count(const sglab_run* run);
SGLAB_API sglab_status sglab_run_row(const sglab_run* run, size_t i, sglab_row* out);
/* 1 if every pass-flagged row passed, 0 otherwise, -1 before execute */
SGLAB_API int sglab_run_all_passed(const sglab_run* run);
SGLAB_API const char* sglab_run_digest(const sglab_run* run);
SGLAB_API const char* sglab_run_output_dir(const sglab_run* run);

/* Writes <dir>/<experiment>.csv and .summary.json; dir NULL uses the configured directory. */
SGLAB_API sglab_status sglab_run_write(const sglab_run* run, const char* dir);

SGLAB_API sglab_status sglab_seed_derive(uint64_t master, const char* const* labels, size_t n, uint64_t* out);
SGLAB_API double sglab_convexity_term(double x, double y, int p);

#ifdef __cplusplus
}
#endif

#endif
