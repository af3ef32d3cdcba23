#ifndef HV2Q_H
#define HV2Q_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum Hv2qStatus {
  HV2Q_STATUS_OK = 0,
  /**
   * Malformed or out-of-domain input (bad JSON, zero vector, too few samples).
   */
  HV2Q_STATUS_INVALID_INPUT = 1,
  /**
   * A required pointer argument was null.
   */
  HV2Q_STATUS_NULL_POINTER = 2,
  /**
   * A numerical routine failed or an internal consistency check tripped.
   */
  HV2Q_STATUS_NUMERICAL = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  HV2Q_STATUS_PANIC = 4,
} Hv2qStatus;

/**
 * Hidden-variable model selector.
 */
typedef enum Hv2qModel {
  /**
   * Bell's singlet model; other states are rejected.
   */
  HV2Q_MODEL_BELL = 0,
  /**
   * Sphere model for any pure state.
   */
  HV2Q_MODEL_GENERAL = 1,
  /**
   * Circle model with one real hidden parameter.
   */
  HV2Q_MODEL_MINIMAL = 2,
} Hv2qModel;

/**
 * Opaque local observable α₁ I + α₂ σ·a.
 */
typedef struct Hv2qObservable Hv2qObservable;

/**
 * Opaque verification report together with its JSON rendering.
 */
typedef struct Hv2qReport Hv2qReport;

/**
 * Opaque two-qubit pure state.
 */
typedef struct Hv2qState Hv2qState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hv2q_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hv2q_version(void);

/**
 * State from 8 doubles: (re, im) of the amplitudes on |00⟩, |01⟩, |10⟩, |11⟩.
 * The vector is normalized.
 *
 * # Safety
 * `amplitudes` must point to 8 readable doubles; `out` must be writable.
 */
enum Hv2qStatus hv2q_state_new(const double *amplitudes, struct Hv2qState **out);

/**
 * The singlet (|01⟩ − |10⟩)/√2.
 *
 * # Safety
 * `out` must be writable.
 */
enum Hv2qStatus hv2q_state_singlet(struct Hv2qState **out);

/**
 * State from `{"amplitudes": [[re, im] x4]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum Hv2qStatus hv2q_state_from_json(const char *json, struct Hv2qState **out);

/**
 * Larger Schmidt weight μ₁ ∈ [1/2, 1].
 *
 * # Safety
 * `state` must be a live handle; `mu1` must be writable.
 */
enum Hv2qStatus hv2q_state_mu1(const struct Hv2qState *state, double *mu1);

/**
 * Releases a state. NULL is ignored.
 *
 * # Safety
 * `state` must come from this library and not be used afterwards.
 */
void hv2q_state_free(struct Hv2qState *state);

/**
 * Observable α₁ I + α₂ σ·a; the axis (x, y, z) is normalized and a negative
 * α₂ flips it.
 *
 * # Safety
 * `out` must be writable.
 */
enum Hv2qStatus hv2q_observable_new(double alpha1,
                                    double alpha2,
                                    double x,
                                    double y,
                                    double z,
                                    struct Hv2qObservable **out);

/**
 * σ·a for a unit vector a.
 *
 * # Safety
 * `out` must be writable.
 */
enum Hv2qStatus hv2q_observable_spin(double x, double y, double z, struct Hv2qObservable **out);

/**
 * Releases an observable. NULL is ignored.
 *
 * # Safety
 * `obs` must come from this library and not be used afterwards.
 */
void hv2q_observable_free(struct Hv2qObservable *obs);

/**
 * Quantum moments ⟨X⊗I⟩, ⟨I⊗Y⟩, ⟨X⊗Y⟩ written to `moments[0..3]`.
 *
 * # Safety
 * Handles must be live; `moments` must point to 3 writable doubles.
 */
enum Hv2qStatus hv2q_qm_moments(const struct Hv2qState *state,
                                const struct Hv2qObservable *x,
                                const struct Hv2qObservable *y,
                                double *moments);

/**
 * Runs a model against the quantum prediction. `samples` = 0 skips Monte
 * Carlo; otherwise at least 10000 are required. Estimates pass within
 * `sigma` standard errors.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum Hv2qStatus hv2q_verify(const struct Hv2qState *state,
                            const struct Hv2qObservable *x,
                            const struct Hv2qObservable *y,
                            enum Hv2qModel model,
                            uint64_t samples,
                            uint64_t seed,
                            double sigma,
                            struct Hv2qReport **out);

/**
 * Overall verdict: 1 if every check passed, 0 otherwise, −1 for NULL.
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
int32_t hv2q_report_pass(const struct Hv2qReport *report);

/**
 * Model moments ⟨X⟩, ⟨Y⟩, ⟨XY⟩ and the largest deviation from the quantum
 * values, written to `values[0..4]`.
 *
 * # Safety
 * `report` must be live; `values` must point to 4 writable doubles.
 */
enum Hv2qStatus hv2q_report_analytic(const struct Hv2qReport *report, double *values);

/**
 * The full report as JSON (schema 1). Owned by the report; valid until
 * [`hv2q_report_free`].
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
const char *hv2q_report_json(const struct Hv2qReport *report);

/**
 * Releases a report. NULL is ignored.
 *
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void hv2q_report_free(struct Hv2qReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HV2Q_H */
