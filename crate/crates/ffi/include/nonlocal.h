#ifndef NONLOCAL_H
#define NONLOCAL_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum NlStatus {
  NL_STATUS_OK = 0,
  // A required pointer argument was NULL.
  NL_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  NL_STATUS_INVALID_UTF8 = 2,
  // A physical or setup parameter violates its invariants.
  NL_STATUS_PARAMETER = 3,
  // A config could not be parsed or names an unknown experiment.
  NL_STATUS_CONFIG = 4,
  // The grid cannot represent the requested state or shift.
  NL_STATUS_GRID = 5,
  // A numerical method failed or an invariant check did not hold.
  NL_STATUS_NUMERICAL = 6,
  NL_STATUS_IO = 7,
  // The output buffer is too small; the required size was reported.
  NL_STATUS_BUFFER_TOO_SMALL = 8,
  NL_STATUS_PANIC = 9,
} NlStatus;

// Opaque result of a config-driven experiment run.
typedef struct NlRun NlRun;

// Opaque joint two-photon amplitude.
typedef struct NlState NlState;

// Complex number as two doubles.
typedef struct NlComplex {
  double re;
  double im;
} NlComplex;

// Two atoms a distance `separation` apart, coupled for `duration`; natural units.
typedef struct NlTwoAtomConfig {
  double separation;
  double omega;
  double dipole;
  double duration;
} NlTwoAtomConfig;

// Outcome of post-selection followed by balancing.
typedef struct NlProtocolResult {
  // Best fidelity with a product state before post-selection.
  double product_fidelity;
  double post_success;
  double stage_success;
  double total_success;
  double concurrence;
  double mutual_information;
  double cos_theta;
} NlProtocolResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *nl_version(void);

// Message of the last failed call on this thread, or NULL after a successful call.
// The pointer stays valid until the next call into this library on the same thread.
const char *nl_last_error_message(void);

// `D_F(r, t)` with regularization ε > 0.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_feynman_propagator(double r, double t, double epsilon, struct NlComplex *out);

// Far-field closed form of the transfer amplitude b.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_amplitude_b_closed(struct NlTwoAtomConfig config, struct NlComplex *out);

// Transfer amplitude b by quadrature with default options; `error_estimate` may be NULL.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_amplitude_b_numeric(struct NlTwoAtomConfig config,
                                     struct NlComplex *out,
                                     double *error_estimate);

// Two-atom state from (b, p_γ), post-selected on no photon and balanced to a′ = b′.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_entanglement_protocol(struct NlComplex b,
                                       double p_gamma,
                                       struct NlProtocolResult *out);

// Gaussian down-conversion state on an `n_points`² grid of full width `span` centered
// at `grid_center` on both axes.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_state_new_pdc(size_t n_points,
                               double span,
                               double grid_center,
                               double center1,
                               double center2,
                               double sigma_plus,
                               double sigma_minus,
                               struct NlState **out);

// Atomic cascade state with lifetimes τ₁ > τ₂.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_state_new_cascade(size_t n_points,
                                   double span,
                                   double grid_center,
                                   double sum_frequency,
                                   double tau1,
                                   double tau2,
                                   struct NlState **out);

// Releases a state; NULL is ignored.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
void nl_state_free(struct NlState *state);

// RMS of t₁ − t₂.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_state_correlation_width(const struct NlState *state, double *out);

// HOM coincidence probability with photon 1 delayed by `delay`.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_hom_coincidence(const struct NlState *state, double delay, double *out);

// Franson coincidence rate (HH ports) normalized to the fringe maximum.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_franson_rate(const struct NlState *state,
                              double delay,
                              double window,
                              double phi1,
                              double phi2,
                              double *out);

// CHSH value at the standard analyzer settings.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_chsh(const struct NlState *state, double delay, double window, double *out);

// Parses a JSON config and runs its experiment.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_run_config(const char *config_json, struct NlRun **out);

// Number of table rows of a run.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_run_rows(const struct NlRun *run, size_t *out);

// Copies the run's CSV table, NUL-terminated, into `buf`. `needed` receives the size
// including the terminator; with `capacity` too small nothing is copied and
// `NL_STATUS_BUFFER_TOO_SMALL` is returned. `buf` may be NULL when `capacity` is 0.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_run_csv(const struct NlRun *run, char *buf, size_t capacity, size_t *needed);

// Writes the run's CSV, sidecar and manifest into `dir`.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
enum NlStatus nl_run_write(const struct NlRun *run, const char *dir);

// Releases a run; NULL is ignored.
//
// # Safety
// Pointer arguments follow the rules in the crate documentation.
void nl_run_free(struct NlRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NONLOCAL_H */
