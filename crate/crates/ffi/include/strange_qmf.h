#ifndef STRANGE_QMF_H
#define STRANGE_QMF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdint.h>

/*
 Result codes. Values 1-4 match the command line exit codes.
 */
typedef enum QmfStatus {
  QMF_STATUS_OK = 0,
  QMF_STATUS_INTERNAL = 1,
  QMF_STATUS_OUTSIDE_DOMAIN = 2,
  QMF_STATUS_SINGULAR_DENOMINATOR = 3,
  QMF_STATUS_TOLERANCE_NOT_MET = 4,
  QMF_STATUS_INVALID_ARGUMENT = 5,
  QMF_STATUS_NULL_POINTER = 6,
} QmfStatus;

/*
 An exact element of a cyclotomic field.
 */
typedef struct QmfCyclotomic QmfCyclotomic;

/*
 Settings of the period integrals.
 */
typedef struct QmfQuadratureConfig {
  double eps;
  double upper;
  double rel_tol;
  uint32_t max_depth;
  uint32_t precision;
  /*
   0 for the principal branch of the kernel, 1 for the second sheet.
   */
  uint32_t branch;
} QmfQuadratureConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next library call on the same thread.
 */
const char *qmf_last_error_message(void);

/*
 Exact value of component `component` ("1", "2", "3" or "F") at `a/k`.

 # Safety
 `component` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QmfStatus qmf_strange_eval(const char *component,
                                int64_t a,
                                int64_t k,
                                struct QmfCyclotomic **out);

/*
 Parses the canonical text form such as `3 - 2*z3`.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QmfStatus qmf_cyclotomic_parse(const char *text, struct QmfCyclotomic **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `h` must come from this library and not be used afterwards.
 */
void qmf_cyclotomic_free(struct QmfCyclotomic *h);

/*
 Canonical text form; release with `qmf_string_free`.

 # Safety
 `h` must be a live handle and `out` a valid pointer.
 */
enum QmfStatus qmf_cyclotomic_to_string(const struct QmfCyclotomic *h, char **out);

/*
 JSON form `{"field": N, "coeffs": [[j, "p/q"], ...]}`; release with
 `qmf_string_free`.

 # Safety
 `h` must be a live handle and `out` a valid pointer.
 */
enum QmfStatus qmf_cyclotomic_to_json(const struct QmfCyclotomic *h, char **out);

/*
 Complex embedding `zeta_N -> e^{2 pi i / N}` rounded to doubles.

 # Safety
 `h` must be a live handle; `re` and `im` must be valid pointers.
 */
enum QmfStatus qmf_cyclotomic_embed(const struct QmfCyclotomic *h, double *re, double *im);

/*
 Writes 1 to `out` when the two values are equal, else 0.

 # Safety
 Both handles must be live and `out` a valid pointer.
 */
enum QmfStatus qmf_cyclotomic_equal(const struct QmfCyclotomic *a,
                                    const struct QmfCyclotomic *b,
                                    int32_t *out);

/*
 Releases a string returned by the library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void qmf_string_free(char *s);

/*
 Library defaults: eps 1e-9, upper 1e9, rel_tol 1e-10, depth 20,
 128 bits, second sheet.
 */
struct QmfQuadratureConfig qmf_quadrature_config_default(void);

/*
 `Omega(a/k)` along the vertical ray. `cfg` may be null for the defaults.

 # Safety
 `re`, `im` and `error_estimate` must be valid pointers; `cfg` valid or null.
 */
enum QmfStatus qmf_omega(int64_t a,
                         int64_t k,
                         const struct QmfQuadratureConfig *cfg,
                         double *re,
                         double *im,
                         double *error_estimate);

/*
 `(theta_1, theta_2, theta_3)` at `z = re + i im`, written to `out` as
 six doubles `re_1, im_1, re_2, im_2, re_3, im_3`.

 # Safety
 `out` must point to six writable doubles.
 */
enum QmfStatus qmf_h_vector(double re, double im, uint32_t precision, double *out);

/*
 Exact `G(a, b, c) = sum_{n<c} e((a n^2 + b n)/c)`.

 # Safety
 `out` must be a valid pointer.
 */
enum QmfStatus qmf_gauss_sum(int64_t a, int64_t b, uint64_t c, struct QmfCyclotomic **out);

/*
 Exact `L(-n, chi)` for the character of family `family` (1 or 2) attached
 to `e^{2 pi i a/k}`.

 # Safety
 `out` must be a valid pointer.
 */
enum QmfStatus qmf_l_value(uint32_t family,
                           int64_t a,
                           int64_t k,
                           uint32_t n,
                           struct QmfCyclotomic **out);

/*
 Library version as a static string.
 */
const char *qmf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRANGE_QMF_H */
