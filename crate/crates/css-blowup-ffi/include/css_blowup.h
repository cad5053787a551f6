#ifndef CSS_BLOWUP_H
#define CSS_BLOWUP_H

/* Generated by cbindgen from the css-blowup-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum CssStatus {
  /**
   * Success.
   */
  CSS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CSS_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CSS_STATUS_INVALID_UTF8 = 2,
  /**
   * A numerical argument was outside its admissible range.
   */
  CSS_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A configuration key or value was rejected.
   */
  CSS_STATUS_CONFIG = 4,
  /**
   * A solver failed (non-convergence, step failure, tube violation, ...).
   */
  CSS_STATUS_NUMERICAL = 5,
  /**
   * Reading or writing files failed.
   */
  CSS_STATUS_IO = 6,
  /**
   * The caller's buffer is too small; the required size was reported.
   */
  CSS_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * A command ran to completion but at least one of its checks failed.
   */
  CSS_STATUS_CHECKS_FAILED = 8,
  /**
   * An internal panic was caught.
   */
  CSS_STATUS_PANIC = 9,
} CssStatus;

/**
 * Opaque run configuration for the experiment commands.
 */
typedef struct CssConfig CssConfig;

/**
 * Opaque complex field on a grid.
 */
typedef struct CssField CssField;

/**
 * Opaque radial grid.
 */
typedef struct CssGrid CssGrid;

/**
 * Opaque split-step evolver bound to a grid and equivariance index.
 */
typedef struct CssStepper CssStepper;

/**
 * Modulation parameters `(t, λ, γ, b, η)` of the closed-form blow-up law.
 */
typedef struct CssModState {
  /**
   * Time.
   */
  double t;
  /**
   * Scale `λ > 0`.
   */
  double lambda;
  /**
   * Phase `γ`.
   */
  double gamma;
  /**
   * Real part of `b + iη`.
   */
  double b;
  /**
   * Imaginary part of `b + iη`.
   */
  double eta;
} CssModState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code (never null, NUL-terminated).
 */
const char *css_status_name(enum CssStatus status);

/**
 * Copy the message of the last failed call on this thread into `buf`.
 *
 * Returns the message length in bytes (excluding the NUL). At most `cap − 1`
 * bytes are copied; the copy is always NUL-terminated when `cap > 0`.
 */
size_t css_last_error_message(char *buf, size_t cap);

/**
 * Logarithmic grid with `n` nodes on `[r_min, r_max]`.
 */
enum CssStatus css_grid_new_log(size_t n, double r_min, double r_max, struct CssGrid **out);

/**
 * Uniform cell-centred grid with `n` nodes on `(0, r_max]`.
 */
enum CssStatus css_grid_new_uniform(size_t n, double r_max, struct CssGrid **out);

/**
 * Number of nodes (0 for a null handle).
 */
size_t css_grid_len(const struct CssGrid *grid);

/**
 * Copy the node radii into `out` (capacity `cap`).
 */
enum CssStatus css_grid_radii(const struct CssGrid *grid, double *out, size_t cap);

/**
 * Release a grid. Fields and steppers built on it keep their own reference.
 */
void css_grid_free(struct CssGrid *grid);

/**
 * Field with index `m` from `len = css_grid_len(grid)` real and imaginary parts.
 */
enum CssStatus css_field_new(const struct CssGrid *grid,
                             int32_t m,
                             const double *re,
                             const double *im,
                             size_t len,
                             struct CssField **out);

/**
 * The Jackiw–Pi vortex `Q` (index 0) sampled on `grid`.
 */
enum CssStatus css_field_vortex(const struct CssGrid *grid, struct CssField **out);

/**
 * Number of samples (0 for a null handle).
 */
size_t css_field_len(const struct CssField *field);

/**
 * Copy the samples into `re` and `im` (capacity `cap` each).
 */
enum CssStatus css_field_values(const struct CssField *field, double *re, double *im, size_t cap);

/**
 * Mass `∫|u|² 2πr dr` of a field.
 */
enum CssStatus css_field_mass(const struct CssField *field, double *out);

/**
 * Energy of a field in its self-dual form.
 */
enum CssStatus css_field_energy(const struct CssField *field, double *out);

/**
 * Release a field.
 */
void css_field_free(struct CssField *field);

/**
 * Evolver for index `m` on `grid`. A nonzero `phase_rotated` selects the temporal
 * potential of the phase-rotated radiation equation.
 */
enum CssStatus css_stepper_new(const struct CssGrid *grid,
                               int32_t m,
                               int32_t phase_rotated,
                               struct CssStepper **out);

/**
 * Advance `field` in place by `steps` Strang steps of size `dt`.
 */
enum CssStatus css_stepper_advance(const struct CssStepper *stepper,
                                   struct CssField *field,
                                   double dt,
                                   size_t steps);

/**
 * Release a stepper.
 */
void css_stepper_free(struct CssStepper *stepper);

/**
 * Configuration with every key at its default.
 */
enum CssStatus css_config_new(struct CssConfig **out);

/**
 * Parse a `key = value` configuration text (`#` starts a comment).
 */
enum CssStatus css_config_parse(const char *text, struct CssConfig **out);

/**
 * Set one key; the whole configuration is revalidated.
 */
enum CssStatus css_config_set(struct CssConfig *config, const char *key, const char *value);

/**
 * Release a configuration.
 */
void css_config_free(struct CssConfig *config);

/**
 * Run an experiment command (`"soliton-check"`, `"mod-ode"`, ...) with default options.
 *
 * The JSON summary is copied into `json` (capacity `cap`); `needed` receives the
 * required capacity. When `out_dir` is non-null the summary and tables are also
 * written there. Returns [`CssStatus::ChecksFailed`] when the command completed
 * but a check failed; the summary is still delivered. A short buffer takes
 * precedence and yields [`CssStatus::BufferTooSmall`].
 */
enum CssStatus css_run(const struct CssConfig *config,
                       const char *command,
                       const char *out_dir,
                       char *json,
                       size_t cap,
                       size_t *needed);

/**
 * Closed-form modulation parameters for amplitude `q`, exponent `ν` at time `t ∈ (−1, 0)`.
 */
enum CssStatus css_closed_form(double q_re,
                               double q_im,
                               double nu_re,
                               double nu_im,
                               double t,
                               struct CssModState *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSS_BLOWUP_H */
