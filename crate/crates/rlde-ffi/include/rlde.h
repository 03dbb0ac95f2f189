#ifndef RLDE_H
#define RLDE_H

/* generated by cbindgen from rlde-ffi; do not edit */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum RldeStatus {
  RLDE_STATUS_OK = 0,
  RLDE_STATUS_INVALID_ARGUMENT = 1,
  RLDE_STATUS_CONFIG_ERROR = 2,
  RLDE_STATUS_IO_ERROR = 3,
  RLDE_STATUS_PARSE_ERROR = 4,
  RLDE_STATUS_NULL_POINTER = 5,
} RldeStatus;

/**
 * Opaque trained-agent handle.
 */
typedef struct RldeAgent RldeAgent;

/**
 * Opaque benchmark-problem handle.
 */
typedef struct RldeProblem RldeProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Width of the fingerprint written by `rlde_problem_features`.
 */
uintptr_t rlde_feature_count(void);

/**
 * Static description of a status code.
 */
const char *rlde_status_message(enum RldeStatus status);

/**
 * Creates a benchmark instance.
 *
 * # Safety
 * `out` must be a valid pointer to an `RldeProblem*` slot.
 */
enum RldeStatus rlde_problem_new(uint8_t function_id,
                                 uintptr_t dimension,
                                 uint64_t instance_seed,
                                 struct RldeProblem **out);

/**
 * Releases a problem handle. Null is a no-op.
 *
 * # Safety
 * `problem` must be a pointer from `rlde_problem_new`, not yet freed.
 */
void rlde_problem_free(struct RldeProblem *problem);

/**
 * Problem dimension; 0 for a null handle.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
uintptr_t rlde_problem_dimension(const struct RldeProblem *problem);

/**
 * Optimal objective value.
 *
 * # Safety
 * `problem` and `out` must be valid pointers.
 */
enum RldeStatus rlde_problem_f_opt(const struct RldeProblem *problem, double *out);

/**
 * Copies the optimum location into `out` (length `dimension`).
 *
 * # Safety
 * `problem` must be live; `out` must hold at least `dimension` doubles.
 */
enum RldeStatus rlde_problem_x_opt(const struct RldeProblem *problem, double *out);

/**
 * Evaluates the objective at `x` (length `len`, which must equal the
 * problem dimension).
 *
 * # Safety
 * `problem` must be live; `x` must hold `len` readable doubles; `out` must
 * be writable.
 */
enum RldeStatus rlde_problem_evaluate(const struct RldeProblem *problem,
                                      const double *x,
                                      uintptr_t len,
                                      double *out);

/**
 * Distance of an objective value from the instance optimum.
 *
 * # Safety
 * `problem` must be live; `out` must be writable.
 */
enum RldeStatus rlde_problem_gap(const struct RldeProblem *problem, double f_value, double *out);

/**
 * Computes the 62-value fingerprint into `out` (length
 * `rlde_feature_count()`), spending 50 * dimension evaluations.
 *
 * # Safety
 * `problem` must be live; `out` must hold `rlde_feature_count()` doubles.
 */
enum RldeStatus rlde_problem_features(const struct RldeProblem *problem,
                                      uint64_t sample_seed,
                                      double *out);

/**
 * Loads a trained agent checkpoint.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
 */
enum RldeStatus rlde_agent_load(const char *path, struct RldeAgent **out);

/**
 * Releases an agent handle. Null is a no-op.
 *
 * # Safety
 * `agent` must be a pointer from `rlde_agent_load`, not yet freed.
 */
void rlde_agent_free(struct RldeAgent *agent);

/**
 * Designs a configuration for the problem and returns it as a JSON string
 * (free with `rlde_string_free`).
 *
 * # Safety
 * `agent` and `problem` must be live handles; `out` must be writable.
 */
enum RldeStatus rlde_agent_design_json(const struct RldeAgent *agent,
                                       const struct RldeProblem *problem,
                                       uint64_t sample_seed,
                                       char **out);

/**
 * Frees a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must come from an rlde function returning an owned string.
 */
void rlde_string_free(char *s);

/**
 * Runs a configured DE on the problem. `config_json` may be null for the
 * canonical baseline (rand/1, binomial, NP = 5D, F = 0.5, Cr = 0.9).
 * Writes the final best objective and the evaluations consumed; when
 * `out_best_x` is non-null it receives the best point (length `dimension`).
 *
 * # Safety
 * `problem` must be live; `config_json`, when non-null, must be a
 * NUL-terminated JSON string; output pointers must be writable.
 */
enum RldeStatus rlde_run(const struct RldeProblem *problem,
                         const char *config_json,
                         uintptr_t max_fes,
                         uint64_t seed,
                         double *out_best_f,
                         uintptr_t *out_fes_used,
                         double *out_best_x);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLDE_H */
