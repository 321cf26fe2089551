#ifndef SEIARB_H
#define SEIARB_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SeiarbStatus {
  SEIARB_STATUS_OK = 0,
  SEIARB_STATUS_NULL_POINTER = 1,
  SEIARB_STATUS_INVALID_UTF8 = 2,
  SEIARB_STATUS_CONFIG = 3,
  SEIARB_STATUS_NUMERIC = 4,
  SEIARB_STATUS_CEA = 5,
  SEIARB_STATUS_BUFFER_TOO_SMALL = 6,
  SEIARB_STATUS_IO = 7,
  SEIARB_STATUS_PANIC = 8,
} SeiarbStatus;

/**
 * Per-scenario and overall cost-effectiveness analysis.
 */
typedef struct SeiarbCeaReport SeiarbCeaReport;

/**
 * Loaded and validated run configuration.
 */
typedef struct SeiarbConfig SeiarbConfig;

/**
 * One solved strategy with its outcome summary.
 */
typedef struct SeiarbSolution SeiarbSolution;

/**
 * Plain-data copy of a strategy's outcome. `time_to_efficacy_1` is negative
 * when the efficacy curves never saturate.
 */
typedef struct SeiarbSummary {
  uint32_t strategy_id;
  double infections_averted;
  double total_cost;
  double recoveries;
  double objective_j;
  double peak_i;
  double time_to_efficacy_1;
  bool converged;
  size_t iterations;
} SeiarbSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *seiarb_last_error_message(void);

/**
 * Built-in default configuration.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SeiarbStatus seiarb_config_default(struct SeiarbConfig **out);

/**
 * Parses and validates a TOML configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` as in
 * [`seiarb_config_default`].
 */
enum SeiarbStatus seiarb_config_from_toml(const char *toml, struct SeiarbConfig **out);

/**
 * # Safety
 * `config` must be NULL or a handle not yet freed.
 */
void seiarb_config_free(struct SeiarbConfig *config);

/**
 * Basic reproduction number of the configured parameters.
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum SeiarbStatus seiarb_config_r0(const struct SeiarbConfig *config, double *out);

/**
 * Solves the zero-control baseline and strategy `strategy_id` (1-14).
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum SeiarbStatus seiarb_solve_strategy(const struct SeiarbConfig *config,
                                        uint32_t strategy_id,
                                        struct SeiarbSolution **out);

/**
 * # Safety
 * `solution` must be NULL or a handle not yet freed.
 */
void seiarb_solution_free(struct SeiarbSolution *solution);

/**
 * Number of grid nodes, or 0 for a NULL handle.
 *
 * # Safety
 * `solution` must be NULL or a live handle.
 */
size_t seiarb_solution_len(const struct SeiarbSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle and `out` writable.
 */
enum SeiarbStatus seiarb_solution_summary(const struct SeiarbSolution *solution,
                                          struct SeiarbSummary *out);

/**
 * Copies states row-major as `len * 6` values (S, E, I, A, R, B per node).
 *
 * # Safety
 * `buf` must point to `capacity` writable doubles.
 */
enum SeiarbStatus seiarb_solution_states(const struct SeiarbSolution *solution,
                                         double *buf,
                                         size_t capacity);

/**
 * Copies controls row-major as `len * 4` values (u1..u4 per node).
 *
 * # Safety
 * `buf` must point to `capacity` writable doubles.
 */
enum SeiarbStatus seiarb_solution_controls(const struct SeiarbSolution *solution,
                                           double *buf,
                                           size_t capacity);

/**
 * Runs the per-scenario and overall eliminations on CSV text with header
 * `strategy_id,infections_averted,cost,recoveries`.
 *
 * # Safety
 * `csv` must be a NUL-terminated string and `out` writable.
 */
enum SeiarbStatus seiarb_cea_replay_csv(const char *csv, struct SeiarbCeaReport **out);

/**
 * Overall winning strategy id.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum SeiarbStatus seiarb_cea_winner(const struct SeiarbCeaReport *report, uint32_t *out);

/**
 * Full report as JSON. Release with [`seiarb_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum SeiarbStatus seiarb_cea_to_json(const struct SeiarbCeaReport *report, char **out);

/**
 * # Safety
 * `report` must be NULL or a handle not yet freed.
 */
void seiarb_cea_free(struct SeiarbCeaReport *report);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void seiarb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEIARB_H */
