#ifndef FREEPROB_H
#define FREEPROB_H

/* Generated by cbindgen from the freeprob-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible functions.
 */
typedef enum FpStatus {
  FP_OK = 0,
  /**
   * Invalid argument (null pointer, bad UTF-8, unknown name, bad params).
   */
  FP_ERR_ARGUMENT = 1,
  /**
   * Evaluation failed (convergence, quadrature, continuation, ...).
   */
  FP_ERR_EVAL = 2,
  /**
   * The measure lacks a representation required by the operation.
   */
  FP_ERR_UNSUPPORTED = 3,
  /**
   * No witness is attached to the report.
   */
  FP_NO_WITNESS = 4,
  /**
   * Internal panic; the library state is still valid.
   */
  FP_ERR_INTERNAL = 5,
} FpStatus;

/**
 * Transform selector for `fp_transform_eval`.
 */
typedef enum FpTransformOp {
  /**
   * Cauchy transform G (upper half plane).
   */
  FP_OP_CAUCHY = 0,
  /**
   * Reciprocal Cauchy transform F = 1/G (upper half plane).
   */
  FP_OP_RECIPROCAL = 1,
  /**
   * Right inverse of F (upper half plane).
   */
  FP_OP_INVERSE = 2,
  /**
   * Voiculescu transform phi (upper half plane).
   */
  FP_OP_VOICULESCU = 3,
  /**
   * Free cumulant transform C (lower half plane).
   */
  FP_OP_CUMULANT = 4,
  /**
   * Derivative C' of the free cumulant transform (lower half plane).
   */
  FP_OP_CUMULANT_DERIVATIVE = 5,
} FpTransformOp;

/**
 * Opaque measure handle.
 */
typedef struct FpMeasure FpMeasure;

/**
 * Opaque check-report handle.
 */
typedef struct FpReport FpReport;

/**
 * Half-plane grid geometry for the FID/FSD checks; pass NULL for defaults
 * (radii 1e-2..1e3 at 25 per decade, 64 angles).
 */
typedef struct FpGrid {
  double r_min;
  double r_max;
  uintptr_t per_decade;
  uintptr_t angles;
} FpGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *fp_version(void);

/**
 * Copies the thread-local last error message into `buf` (truncated to
 * `len - 1` bytes, always NUL-terminated); returns the full message length.
 */
uintptr_t fp_last_error(char *buf, uintptr_t len);

/**
 * Builds a catalog measure; `params` is a `key=value` record like
 * `"a=0, r=2"` (NULL for defaults). Returns NULL on error.
 */
struct FpMeasure *fp_measure_catalog(const char *name, const char *params);

/**
 * Reads a measure from its tagged JSON document. Returns NULL on error.
 */
struct FpMeasure *fp_measure_from_json(const char *json);

/**
 * Serializes a measure to its tagged JSON document (free with
 * `fp_string_free`).
 */
char *fp_measure_to_json(const struct FpMeasure *m);

void fp_measure_free(struct FpMeasure *m);

void fp_string_free(char *s);

/**
 * Grid FSD check (Im C' over a lower-half-plane grid); NULL grid uses the
 * defaults. Returns NULL only on argument errors.
 */
struct FpReport *fp_check_fsd(const struct FpMeasure *m, const struct FpGrid *grid);

/**
 * Grid FID check (Im phi over an upper-half-plane grid).
 */
struct FpReport *fp_check_fid(const struct FpMeasure *m, const struct FpGrid *grid);

/**
 * Exact Hankel FSD criterion on `{n kappa_n}` at the given order; needs a
 * measure with moments.
 */
struct FpReport *fp_check_fsd_cumulant(const struct FpMeasure *m, uintptr_t order);

/**
 * Exact Hankel FID criterion on `{kappa_n}` at the given order.
 */
struct FpReport *fp_check_fid_cumulant(const struct FpMeasure *m, uintptr_t order);

/**
 * Levy-measure monotonicity check; needs a measure with a characteristic
 * triplet.
 */
struct FpReport *fp_check_levy_monotone(const struct FpMeasure *m);

/**
 * Report verdict: 0 = pass, 1 = fail, 2 = inconclusive, -1 on null input.
 */
int32_t fp_report_verdict(const struct FpReport *r);

/**
 * Worst signed margin of the check (max imaginary part for half-plane
 * checks); NaN on null input.
 */
double fp_report_margin(const struct FpReport *r);

/**
 * Witness location and value, when the report carries one.
 */
enum FpStatus fp_report_witness(const struct FpReport *r,
                                double *loc_re,
                                double *loc_im,
                                double *val_re,
                                double *val_im);

/**
 * Full report as deterministic JSON (free with `fp_string_free`).
 */
char *fp_report_json(const struct FpReport *r);

void fp_report_free(struct FpReport *r);

/**
 * Evaluates one analytic transform at `re + i im`, writing the value and
 * an error estimate.
 */
enum FpStatus fp_transform_eval(const struct FpMeasure *m,
                                enum FpTransformOp op,
                                double re,
                                double im,
                                double *out_re,
                                double *out_im,
                                double *out_err);

/**
 * Askey-Wimp-Kerov density `kappa_c(t)`.
 */
enum FpStatus fp_awk_density(double c, double t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEPROB_H */
