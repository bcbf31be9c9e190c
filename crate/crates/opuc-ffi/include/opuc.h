#ifndef OPUC_H
#define OPUC_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit-code taxonomy.
 */
typedef enum OpucStatus {
  OpucStatus_Ok = 0,
  /**
   * Bad spec text, bad parameters, class refusals.
   */
  OpucStatus_ConfigError = 2,
  /**
   * Numerical failure during evaluation.
   */
  OpucStatus_NumericalError = 3,
  /**
   * A required pointer argument was null.
   */
  OpucStatus_NullArgument = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  OpucStatus_BadUtf8 = 5,
} OpucStatus;

/**
 * Opaque measure handle.
 */
typedef struct OpucMeasure OpucMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *opuc_last_error(void);

/**
 * Create a measure from measure-spec TOML text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OpucStatus opuc_measure_from_toml(const char *text, struct OpucMeasure **out);

/**
 * Create a measure from a measure-spec file path.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OpucStatus opuc_measure_from_file(const char *path, struct OpucMeasure **out);

/**
 * Release a measure handle.
 *
 * # Safety
 * `handle` must come from a creation call and not be freed twice.
 */
void opuc_measure_free(struct OpucMeasure *handle);

/**
 * Class verdicts of the measure.
 *
 * # Safety
 * All pointers must be valid.
 */
enum OpucStatus opuc_measure_classes(const struct OpucMeasure *handle,
                                     bool *is_szego,
                                     bool *is_poly_szego);

/**
 * Verblunsky coefficients α₀..α_{n−1} into caller-provided arrays.
 *
 * # Safety
 * `re` and `im` must point to at least `n` doubles.
 */
enum OpucStatus opuc_verblunsky(const struct OpucMeasure *handle, size_t n, double *re, double *im);

/**
 * Both sides of the sum rule for the measure's own weight. `z_trace` is
 * written only when the measure has finite Verblunsky support
 * (`has_trace`).
 *
 * # Safety
 * All pointers must be valid.
 */
enum OpucStatus opuc_sum_rule(const struct OpucMeasure *handle,
                              double *z_direct,
                              double *z_trace,
                              bool *has_trace);

/**
 * Modified Szegő function D̃ at z = z_re + i·z_im (|z| < 1).
 *
 * # Safety
 * All pointers must be valid.
 */
enum OpucStatus opuc_dtilde(const struct OpucMeasure *handle,
                            double z_re,
                            double z_im,
                            double *out_re,
                            double *out_im);

/**
 * ξₙ = D̃·φ̃*ₙ at z (|z| < 1).
 *
 * # Safety
 * All pointers must be valid.
 */
enum OpucStatus opuc_xi(const struct OpucMeasure *handle,
                        size_t n,
                        double z_re,
                        double z_im,
                        double *out_re,
                        double *out_im);

/**
 * Classical extremal distance min{‖f‖²_σ : deg f ≤ n, f(0) = 1}.
 *
 * # Safety
 * All pointers must be valid.
 */
enum OpucStatus opuc_classical_distance(const struct OpucMeasure *handle, size_t n, double *out);

/**
 * Run the full experiment pipeline: every task on the measure in
 * `spec_path`, reports written under `out_dir`. `all_passed` receives the
 * summary verdict; a false verdict is not an error (the reports carry the
 * failing checks).
 *
 * # Safety
 * `spec_path` and `out_dir` must be NUL-terminated strings; `all_passed`
 * must be a valid pointer.
 */
enum OpucStatus opuc_run_experiment(const char *spec_path,
                                    const char *out_dir,
                                    size_t n_max,
                                    uint64_t seed,
                                    size_t workers,
                                    bool *all_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPUC_H */
