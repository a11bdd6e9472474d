#ifndef MA_SECRECY_H
#define MA_SECRECY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_INVALID_ARGUMENT = 2,
  MS_STATUS_PARSE = 3,
  MS_STATUS_VALIDATION = 4,
  MS_STATUS_INFEASIBLE = 5,
  MS_STATUS_SOLVER = 6,
  MS_STATUS_INVARIANT = 7,
  MS_STATUS_IO = 8,
  MS_STATUS_PANIC = 9,
  MS_STATUS_BUFFER_TOO_SMALL = 10,
} MsStatus;

/**
 * Result of a solve.
 */
typedef struct MsReport MsReport;

/**
 * Problem instance.
 */
typedef struct MsScenario MsScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ms_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ms_version(void);

/**
 * Draws a random instance.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MsStatus ms_scenario_draw(size_t users,
                               size_t eves,
                               size_t antennas,
                               double snr_db,
                               double region_side,
                               uint64_t seed,
                               struct MsScenario **out);

/**
 * Parses and validates a scenario from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum MsStatus ms_scenario_from_json(const char *json, struct MsScenario **out);

/**
 * Serializes a scenario. Free the result with [`ms_string_free`].
 *
 * # Safety
 * `scenario` must come from this library; `out` must be valid for writes.
 */
enum MsStatus ms_scenario_to_json(const struct MsScenario *scenario, char **out);

/**
 * Number of users, eavesdroppers and antennas.
 *
 * # Safety
 * `scenario` must come from this library; the outputs must be valid for writes.
 */
enum MsStatus ms_scenario_dims(const struct MsScenario *scenario,
                               size_t *users,
                               size_t *eves,
                               size_t *antennas);

/**
 * # Safety
 * `scenario` must come from this library or be null.
 */
void ms_scenario_free(struct MsScenario *scenario);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ms_string_free(char *s);

/**
 * Runs the solver. `fixed_positions` selects the fixed-array baseline;
 * `grid_points` of 0 keeps the default grid.
 *
 * # Safety
 * `scenario` must come from this library; `out` must be valid for writes.
 */
enum MsStatus ms_solve(const struct MsScenario *scenario,
                       bool fixed_positions,
                       size_t grid_points,
                       struct MsReport **out);

/**
 * Sum secrecy rate of the reported solution, in bits/s/Hz.
 *
 * # Safety
 * `report` must come from this library; `out` must be valid for writes.
 */
enum MsStatus ms_report_sum_rate(const struct MsReport *report, double *out);

/**
 * # Safety
 * `report` must come from this library; `out` must be valid for writes.
 */
enum MsStatus ms_report_iterations(const struct MsReport *report, size_t *out);

/**
 * # Safety
 * `report` must come from this library; `out` must be valid for writes.
 */
enum MsStatus ms_report_converged(const struct MsReport *report, bool *out);

/**
 * Copies the per-iteration sum-rate trajectory into `buf`. `len` receives
 * the trajectory length; if it exceeds `cap` nothing is copied and
 * `MS_STATUS_BUFFER_TOO_SMALL` is returned. `buf` may be null when `cap` is 0.
 *
 * # Safety
 * `buf` must be valid for `cap` writes; `len` must be valid for writes.
 */
enum MsStatus ms_report_trajectory(const struct MsReport *report,
                                   double *buf,
                                   size_t cap,
                                   size_t *len);

/**
 * Antenna positions of the reported solution as `x0, y0, x1, y1, ...`.
 * `cap` counts doubles and must be at least twice the antenna count.
 *
 * # Safety
 * `buf` must be valid for `cap` writes.
 */
enum MsStatus ms_report_positions(const struct MsReport *report, double *buf, size_t cap);

/**
 * Serializes the full report. Free the result with [`ms_string_free`].
 *
 * # Safety
 * `report` must come from this library; `out` must be valid for writes.
 */
enum MsStatus ms_report_to_json(const struct MsReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library or be null.
 */
void ms_report_free(struct MsReport *report);

/**
 * Sum secrecy rate of an arbitrary design.
 *
 * `positions` holds `2 * antennas` doubles (`x0, y0, ...`). `beamformer`
 * holds `2 * antennas * users` doubles: user-major columns of interleaved
 * real and imaginary parts.
 *
 * # Safety
 * Both arrays must hold the stated number of doubles.
 */
enum MsStatus ms_secrecy_rate(const struct MsScenario *scenario,
                              const double *positions,
                              const double *beamformer,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MA_SECRECY_H */
