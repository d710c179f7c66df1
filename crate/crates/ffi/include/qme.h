#ifndef QME_H
#define QME_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmeStatus {
  QME_STATUS_OK = 0,
  QME_STATUS_DOMAIN = 1,
  QME_STATUS_QUADRATURE = 2,
  QME_STATUS_BRACKET = 3,
  QME_STATUS_CONTRACT = 4,
  QME_STATUS_IMPOSSIBLE_OUTCOME = 5,
  QME_STATUS_CONFIG = 6,
  QME_STATUS_NULL_POINTER = 7,
  QME_STATUS_OUT_OF_RANGE = 8,
  QME_STATUS_PANIC = 9,
} QmeStatus;

typedef enum QmeFamily {
  QME_FAMILY_SINE = 0,
  QME_FAMILY_HARD = 1,
  QME_FAMILY_SMOOTH = 2,
} QmeFamily;

typedef enum QmeOutcome {
  QME_OUTCOME_INSIDE = 0,
  QME_OUTCOME_OUTSIDE = 1,
} QmeOutcome;

typedef enum QmeScenarioKind {
  QME_SCENARIO_KIND_RB_ELEVATOR = 0,
  QME_SCENARIO_KIND_NEUTRON_MIRROR = 1,
  QME_SCENARIO_KIND_ELECTRON_BATTERY = 2,
} QmeScenarioKind;

/**
 * Result of measuring the ground state. Opaque.
 */
typedef struct QmeMeasurement QmeMeasurement;

/**
 * A simulated run. Opaque.
 */
typedef struct QmeTrajectory QmeTrajectory;

/**
 * Scalar part of a measurement. Energies of impossible outcomes are NaN;
 * the hard window reports infinite heat and post-state energies.
 */
typedef struct QmeMeasurementSummary {
  enum QmeFamily family;
  double epsilon;
  double w;
  double p_i;
  double p_o;
  double e_initial;
  double e_i;
  double e_o;
  double work;
  double heat;
  double efficiency;
  double heat_dumped;
} QmeMeasurementSummary;

typedef struct QmeEngineParams {
  double epsilon;
  double w;
  enum QmeFamily family;
  double tau_i;
  double tau_o;
  double t_demon;
} QmeEngineParams;

typedef struct QmeCycleRecord {
  uint64_t index;
  enum QmeOutcome outcome;
  double wall_before;
  double wall_after;
  double work;
  double quantum_heat_drawn;
  double heat_dumped;
  double erasure_cost;
} QmeCycleRecord;

typedef struct QmeTotals {
  double work;
  double heat;
  double dumped;
  double wall_position;
  double elapsed_time;
  uint64_t successes;
} QmeTotals;

typedef struct QmeMeterBudget {
  double omega_m;
  double w_m;
  double e_m;
  double q_q;
  double p_o;
  double reset_cost;
} QmeMeterBudget;

/**
 * Parameter overrides; NaN leaves the default in place.
 */
typedef struct QmeOverrides {
  double mass;
  double field;
  double voltage;
  double gap;
} QmeOverrides;

/**
 * SI values. `gap` and `voltage` are NaN outside the battery.
 */
typedef struct QmeScenario {
  enum QmeScenarioKind kind;
  double mass;
  double force;
  double x0;
  double energy_scale;
  double t_star;
  double gap;
  double voltage;
} QmeScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qme_last_error_message(void);

/**
 * Ai and Ai' at `z`.
 *
 * # Safety
 * `ai` and `ai_prime` must be valid for writes.
 */
enum QmeStatus qme_airy(double z, double *ai, double *ai_prime);

/**
 * n-th zero of Ai, `n >= 1`.
 *
 * # Safety
 * `zero` must be valid for writes.
 */
enum QmeStatus qme_airy_zero(uint32_t n, double *zero);

/**
 * Energy of level `n >= 1` with the wall at `u_wall`.
 *
 * # Safety
 * `value` must be valid for writes.
 */
enum QmeStatus qme_level_energy(double u_wall, uint32_t n, double *value);

/**
 * Measures the ground state of the trap with the wall at the origin.
 *
 * # Safety
 * `handle` must be valid for writes. On success `*handle` owns a new
 * object to be released with [`qme_measurement_free`].
 */
enum QmeStatus qme_measure_ground_state(enum QmeFamily family,
                                        double epsilon,
                                        double w,
                                        struct QmeMeasurement **handle);

/**
 * # Safety
 * `handle` must come from [`qme_measure_ground_state`]; `summary` must be
 * valid for writes.
 */
enum QmeStatus qme_measurement_summary(const struct QmeMeasurement *handle,
                                       struct QmeMeasurementSummary *summary);

/**
 * Post-measurement wavefunction of `outcome` at `u`.
 *
 * # Safety
 * `handle` must come from [`qme_measure_ground_state`]; `value` must be
 * valid for writes.
 */
enum QmeStatus qme_measurement_post_state(const struct QmeMeasurement *handle,
                                          enum QmeOutcome outcome,
                                          double u,
                                          double *value);

/**
 * # Safety
 * `handle` must be null or come from [`qme_measure_ground_state`], and must
 * not be used afterwards.
 */
void qme_measurement_free(struct QmeMeasurement *handle);

/**
 * Parameters with durations equal to `epsilon` (1 when it is 0) and a demon
 * at zero temperature.
 */
struct QmeEngineParams qme_engine_params_default(double epsilon, double w, enum QmeFamily family);

/**
 * Runs `n_cycles` cycles from `seed`; identical inputs give identical runs.
 *
 * # Safety
 * `params` must be readable and `handle` valid for writes. On success
 * `*handle` must be released with [`qme_trajectory_free`].
 */
enum QmeStatus qme_trajectory_run(const struct QmeEngineParams *params,
                                  uint64_t n_cycles,
                                  uint64_t seed,
                                  struct QmeTrajectory **handle);

/**
 * Number of cycles, 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or come from [`qme_trajectory_run`].
 */
uint64_t qme_trajectory_len(const struct QmeTrajectory *handle);

/**
 * # Safety
 * `handle` must come from [`qme_trajectory_run`]; `record` must be valid
 * for writes.
 */
enum QmeStatus qme_trajectory_record(const struct QmeTrajectory *handle,
                                     uint64_t index,
                                     struct QmeCycleRecord *record);

/**
 * # Safety
 * `handle` must come from [`qme_trajectory_run`]; `totals` must be valid
 * for writes.
 */
enum QmeStatus qme_trajectory_totals(const struct QmeTrajectory *handle, struct QmeTotals *totals);

/**
 * # Safety
 * `handle` must be null or come from [`qme_trajectory_run`], and must not
 * be used afterwards.
 */
void qme_trajectory_free(struct QmeTrajectory *handle);

/**
 * # Safety
 * `params` must be readable; `power` and `velocity` valid for writes.
 */
enum QmeStatus qme_average_power(const struct QmeEngineParams *params,
                                 double *power,
                                 double *velocity);

/**
 * # Safety
 * `value` must be valid for writes.
 */
enum QmeStatus qme_erasure_cost(double p_i, double p_o, double *value);

/**
 * # Safety
 * `budget` must be valid for writes.
 */
enum QmeStatus qme_meter_budget(double epsilon, double w, struct QmeMeterBudget *budget);

/**
 * Optimal `epsilon` of the gradual limit and its efficiency.
 *
 * # Safety
 * Both pointers must be valid for writes.
 */
enum QmeStatus qme_find_epsilon_star(double *epsilon, double *efficiency);

/**
 * # Safety
 * Both pointers must be valid for writes.
 */
enum QmeStatus qme_find_max_work_hard_window(double *epsilon, double *work);

/**
 * Ratio `w / epsilon` maximizing the small-window efficiency.
 *
 * # Safety
 * Both pointers must be valid for writes.
 */
enum QmeStatus qme_find_zeno_zeta(double *zeta, double *efficiency);

/**
 * # Safety
 * `overrides` must be null or readable; `result` valid for writes.
 */
enum QmeStatus qme_scenario(enum QmeScenarioKind kind,
                            const struct QmeOverrides *overrides,
                            struct QmeScenario *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QME_H */
