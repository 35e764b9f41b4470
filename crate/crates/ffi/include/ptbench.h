#ifndef PTBENCH_H
#define PTBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PtbStatus {
  PTB_STATUS_OK = 0,
  PTB_STATUS_INVALID_ARGUMENT = 1,
  PTB_STATUS_BROKEN_PHASE = 2,
  PTB_STATUS_NULL_POINTER = 3,
  PTB_STATUS_ZERO_INTENSITY = 4,
  PTB_STATUS_INTERNAL = 5,
} PtbStatus;

typedef enum PtbMediumPosition {
  PTB_MEDIUM_POSITION_AFTER_BS = 0,
  PTB_MEDIUM_POSITION_BEFORE_BS = 1,
} PtbMediumPosition;

/**
 * Opaque medium handle.
 */
typedef struct PtbMedium PtbMedium;

typedef struct PtbMediumParams {
  double eta1;
  double phi1;
  double eta2;
  double phi2;
} PtbMediumParams;

typedef struct PtbDerived {
  double alpha;
  double length;
  double global_phase;
} PtbDerived;

typedef struct PtbComplex {
  double re;
  double im;
} PtbComplex;

/**
 * Row-major 2x2 complex matrix.
 */
typedef struct PtbMatrix2 {
  struct PtbComplex m[4];
} PtbMatrix2;

typedef struct PtbSettings {
  /**
   * `r = sin(bs_angle)`, `t = cos(bs_angle)`.
   */
  double bs_angle;
  double hwp_angle;
  double bs_phases[4];
  enum PtbMediumPosition medium_position;
  bool mirror_swap;
} PtbSettings;

typedef struct PtbDetection {
  double w_uh;
  double w_uv;
  double w_lh;
  double w_lv;
} PtbDetection;

typedef struct PtbProbabilities {
  double p_uh;
  double p_uv;
  double p_lh;
  double p_lv;
  double pa_h;
  double pa_v;
  double pb_u;
  double pb_l;
} PtbProbabilities;

typedef struct PtbChshResult {
  double s_max;
  /**
   * `[bs_angle_1, beta_1, bs_angle_2, beta_2]`.
   */
  double settings[4];
  double grid_s_max;
} PtbChshResult;

typedef struct PtbViolationResult {
  double delta;
  double beta;
  double phi_a;
  double phi_b;
} PtbViolationResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a medium handle. Phases are wrapped into `[0, 2pi)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum PtbStatus ptb_medium_new(double eta1,
                              double phi1,
                              double eta2,
                              double phi2,
                              struct PtbMedium **out);

/**
 * Creates a handle for the rubidium vapour preset
 * (`eta1 = 1.91, phi1 = 0.84 pi, eta2 = 36.5, phi2 = 0`).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum PtbStatus ptb_medium_fig2(struct PtbMedium **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `m` must be null or a handle returned by this library and not yet freed.
 */
void ptb_medium_free(struct PtbMedium *m);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum PtbStatus ptb_medium_params(const struct PtbMedium *m, struct PtbMediumParams *out);

/**
 * # Safety
 * `m` must be a live handle or null.
 */
bool ptb_medium_is_unbroken(const struct PtbMedium *m);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum PtbStatus ptb_medium_derive(const struct PtbMedium *m, struct PtbDerived *out);

/**
 * Closed-form propagator over the medium length.
 *
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum PtbStatus ptb_medium_m_opt(const struct PtbMedium *m, struct PtbMatrix2 *out);

/**
 * Numerical `exp(-i H z)`; valid in either PT phase.
 *
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum PtbStatus ptb_medium_m_opt_numeric(const struct PtbMedium *m,
                                        double z,
                                        struct PtbMatrix2 *out);

/**
 * Fills `out` with the default bench settings: full reflection, `beta = pi/4`,
 * standard splitter phases, medium after the splitter, swap enabled.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum PtbStatus ptb_settings_default(struct PtbSettings *out);

/**
 * # Safety
 * `m` must be a live handle, `settings` readable and `out` writable.
 */
enum PtbStatus ptb_run_bench(const struct PtbMedium *m,
                             const struct PtbSettings *settings,
                             struct PtbDetection *out);

/**
 * # Safety
 * `record` must be readable and `out` writable.
 */
enum PtbStatus ptb_probabilities(const struct PtbDetection *record, struct PtbProbabilities *out);

/**
 * Closed-form polarization marginals.
 *
 * # Safety
 * `m` must be a live handle, `settings` readable, `pa_h` and `pa_v` writable.
 */
enum PtbStatus ptb_p_single_closed_form(const struct PtbMedium *m,
                                        const struct PtbSettings *settings,
                                        double *pa_h,
                                        double *pa_v);

/**
 * `|P_A(h; phi_a) - P_A(h; phi_b)|` with the remaining settings from `settings`.
 *
 * # Safety
 * `m` must be a live handle, `settings` readable and `out` writable.
 */
enum PtbStatus ptb_signaling_delta(const struct PtbMedium *m,
                                   const struct PtbSettings *settings,
                                   double phi_a,
                                   double phi_b,
                                   double *out);

/**
 * # Safety
 * `m` must be a live handle, `settings` readable and `out` writable.
 */
enum PtbStatus ptb_chsh_s(const struct PtbMedium *m,
                          const struct PtbSettings *settings,
                          const double (*angles)[4],
                          double *out);

/**
 * # Safety
 * `m` must be a live handle, `settings` readable and `out` writable.
 */
enum PtbStatus ptb_max_chsh(const struct PtbMedium *m,
                            const struct PtbSettings *settings,
                            size_t resolution,
                            struct PtbChshResult *out);

/**
 * # Safety
 * `m` must be a live handle, `settings` readable and `out` writable.
 */
enum PtbStatus ptb_max_violation(const struct PtbMedium *m,
                                 const struct PtbSettings *settings,
                                 size_t resolution,
                                 struct PtbViolationResult *out);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes of writes.
 */
size_t ptb_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ptb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PTBENCH_H */
