#ifndef WARDSIM_H
#define WARDSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_PARAMETERS = 2,
  WS_STATUS_INVALID_CONFIG = 3,
  WS_STATUS_UNKNOWN_EXPERIMENT = 4,
  WS_STATUS_IO = 5,
  WS_STATUS_BUFFER_TOO_SMALL = 6,
  WS_STATUS_PANIC = 7,
} WsStatus;

typedef enum WsPolicy {
  WS_POLICY_NONE = 0,
  WS_POLICY_TOTAL = 1,
  WS_POLICY_RANDOM = 2,
} WsPolicy;

/**
 * Opaque simulation handle.
 */
typedef struct WsSimulation WsSimulation;

/**
 * Model parameters, field for field.
 */
typedef struct WsParameters {
  double a_r;
  double a_s;
  double a_c;
  double a_d;
  double k_r;
  double k_s;
  double k_c;
  double k_d;
  double p_rs;
  double p_sc;
  double p_sd;
  double p_cd;
  double p_cr;
  double p_dr;
  double p_ds;
  double p_death;
  double p_ic;
  double p_id;
  double p_ht;
  double p_lt;
  double shed_c;
  double shed_d;
  uint32_t min_stay_r;
  uint32_t min_stay_s;
  uint32_t min_stay_c;
  uint32_t min_stay_d;
  uint32_t initial_patients;
  uint32_t admissions_per_tick;
  uint32_t capacity;
} WsParameters;

/**
 * Intervention settings. `policy` takes a `WsPolicy` value.
 * Interval/rate fields are ignored for `WS_POLICY_NONE`; `random_count`
 * only applies to `WS_POLICY_RANDOM`.
 */
typedef struct WsScenario {
  bool direct_infection;
  uint32_t policy;
  uint32_t ht_interval;
  double ht_rate;
  uint32_t lt_interval;
  double lt_rate;
  uint32_t random_count;
} WsScenario;

typedef struct WsCounters {
  uint64_t infected_by_ht;
  uint64_t infected_by_lt;
  uint64_t infected_by_colonized;
  uint64_t infected_by_diseased;
  uint64_t admissions;
  uint64_t discharges;
  uint64_t deaths;
  uint64_t spontaneous_colonizations;
} WsCounters;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ws_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ws_version(void);

/**
 * Fills `out` with the default model parameters.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one `WsParameters`.
 */
enum WsStatus ws_parameters_default(struct WsParameters *out);

/**
 * Checks a parameter set without running anything.
 *
 * # Safety
 * `params` must be NULL or point to a valid `WsParameters`.
 */
enum WsStatus ws_parameters_validate(const struct WsParameters *params);

/**
 * Creates a simulation at tick 0 with its initial cohort admitted. NULL
 * `params` or `scenario` select the defaults (no cleaning, no direct
 * contact).
 *
 * # Safety
 * `params`/`scenario` must be NULL or valid; `out` must be writable.
 */
enum WsStatus ws_simulation_new(const struct WsParameters *params,
                                const struct WsScenario *scenario,
                                uint64_t seed,
                                uint32_t horizon,
                                struct WsSimulation **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `sim` must be NULL or a handle from `ws_simulation_new` not yet freed.
 */
void ws_simulation_free(struct WsSimulation *sim);

/**
 * Advances by up to `ticks` ticks, stopping at the configured horizon.
 * Writes the number of ticks actually run to `advanced` when non-NULL.
 *
 * # Safety
 * `sim` must be a live handle; `advanced` NULL or writable.
 */
enum WsStatus ws_simulation_step(struct WsSimulation *sim, uint32_t ticks, uint32_t *advanced);

/**
 * Runs the simulation to its horizon.
 *
 * # Safety
 * `sim` must be a live handle.
 */
enum WsStatus ws_simulation_run(struct WsSimulation *sim);

/**
 * Current tick, or 0 for NULL.
 *
 * # Safety
 * `sim` must be NULL or a live handle.
 */
uint64_t ws_simulation_tick(const struct WsSimulation *sim);

/**
 * Number of patients on the ward, or 0 for NULL.
 *
 * # Safety
 * `sim` must be NULL or a live handle.
 */
uint32_t ws_simulation_population(const struct WsSimulation *sim);

/**
 * Writes patient counts per state (resistant, susceptible, colonized,
 * diseased) into `out[0..4]`.
 *
 * # Safety
 * `sim` must be a live handle; `out` must have room for 4 values.
 */
enum WsStatus ws_simulation_state_counts(const struct WsSimulation *sim, uint32_t *out);

/**
 * Total contamination over all high-touch (`high_touch` true) or low-touch
 * surfaces. Returns a negative value for NULL.
 *
 * # Safety
 * `sim` must be NULL or a live handle.
 */
double ws_simulation_contamination(const struct WsSimulation *sim, bool high_touch);

/**
 * Copies the attribution and flow counters.
 *
 * # Safety
 * `sim` must be a live handle; `out` writable.
 */
enum WsStatus ws_simulation_counters(const struct WsSimulation *sim, struct WsCounters *out);

/**
 * One-shot replica: create, run to `horizon`, report counters.
 *
 * # Safety
 * Same pointer rules as `ws_simulation_new`; `out` writable.
 */
enum WsStatus ws_run_replica(const struct WsParameters *params,
                             const struct WsScenario *scenario,
                             uint64_t seed,
                             uint32_t horizon,
                             struct WsCounters *out);

/**
 * Number of combinations in factorial experiment 1, 2 or 3.
 *
 * # Safety
 * `out` must be writable.
 */
enum WsStatus ws_experiment_combo_count(uint32_t experiment_id, uint32_t *out);

/**
 * Runs experiment 1, 2 or 3 (0 for all three) with default parameters and
 * writes the results and summary CSV files.
 *
 * # Safety
 * Both paths must be valid NUL-terminated strings.
 */
enum WsStatus ws_experiment_run(uint32_t experiment_id,
                                uint32_t replicas,
                                uint64_t base_seed,
                                uint32_t horizon,
                                uint32_t parallelism,
                                const char *results_path,
                                const char *summary_path);

/**
 * Copies the text layout (30 lines of 30 glyphs, `\n`-terminated, plus a
 * trailing NUL) into `buf`. With a NULL or short buffer, writes the
 * required size to `needed` and returns `WS_STATUS_BUFFER_TOO_SMALL`.
 *
 * # Safety
 * `buf` must be NULL or hold `len` writable bytes; `needed` NULL or writable.
 */
enum WsStatus ws_layout_render(char *buf, size_t len, size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARDSIM_H */
