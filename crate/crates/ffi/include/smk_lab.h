#ifndef SMK_LAB_H
#define SMK_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmkStatus {
  SMK_STATUS_OK = 0,
  SMK_STATUS_NULL_POINTER = 1,
  SMK_STATUS_INVALID_PARAMETER = 2,
  SMK_STATUS_UNKNOWN_FUNCTION = 3,
  SMK_STATUS_TRUNCATION_FAILURE = 4,
  SMK_STATUS_NON_FINITE = 5,
  SMK_STATUS_PANIC = 6,
} SmkStatus;

/**
 * Bivariate operator `Y*_{m,m,a}`.
 */
typedef struct SmkBivariateOperator SmkBivariateOperator;

/**
 * Univariate operator `S*_{n,a}` with its truncation and quadrature settings.
 */
typedef struct SmkOperator SmkOperator;

/**
 * `f(u, user_data)`.
 */
typedef double (*SmkScalarCallback)(double, void*);

/**
 * `f(u, v, user_data)`.
 */
typedef double (*SmkBivariateCallback)(double, double, void*);

/**
 * Message for the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *smk_last_error_message(void);

/**
 * Creates `S*_{n,a}`. A nonpositive `tail_eps` or zero `quad_points` selects
 * the defaults (`1e-12`, 5 points).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum SmkStatus smk_operator_new(uint64_t n,
                                double a,
                                double tail_eps,
                                size_t quad_points,
                                struct SmkOperator **out);

/**
 * # Safety
 * `op` must be NULL or a handle from [`smk_operator_new`] not yet freed.
 */
void smk_operator_free(struct SmkOperator *op);

/**
 * `S*_{n,a}(f; x)` for a caller-supplied function.
 *
 * # Safety
 * `op` must be a live handle, `out` writable, and `f` safe to call with
 * `user_data` for the duration of the call.
 */
enum SmkStatus smk_operator_apply(const struct SmkOperator *op,
                                  SmkScalarCallback f,
                                  void *user_data,
                                  double x,
                                  double *out);

/**
 * `S*_{n,a}(f; x)` for a catalog function such as `"exp-neg2x"`.
 *
 * # Safety
 * `op` must be a live handle, `name` a NUL-terminated string, `out` writable.
 */
enum SmkStatus smk_operator_apply_named(const struct SmkOperator *op,
                                        const char *name,
                                        double x,
                                        double *out);

/**
 * Kantorovich operator `K_n(f; x)` with the handle's degree and settings.
 *
 * # Safety
 * As [`smk_operator_apply_named`].
 */
enum SmkStatus smk_operator_kantorovich_named(const struct SmkOperator *op,
                                              const char *name,
                                              double x,
                                              double *out);

/**
 * Writes `S*(e_i; x)` for `i = 0..=3` into `out[0..4]`.
 *
 * # Safety
 * `op` must be a live handle and `out` point to 4 writable doubles.
 */
enum SmkStatus smk_operator_raw_moments(const struct SmkOperator *op, double x, double *out);

/**
 * Writes `S*((u - x)^i; x)` for `i = 1..=4` into `out[0..4]`.
 *
 * # Safety
 * `op` must be a live handle and `out` point to 4 writable doubles.
 */
enum SmkStatus smk_operator_central_moments(const struct SmkOperator *op, double x, double *out);

/**
 * Second central moment `delta_{n,a}(x)`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SmkStatus smk_operator_delta(const struct SmkOperator *op, double x, double *out);

/**
 * Poisson mean `x ln a / (a^(1/n) - 1)` of the weights at `x`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SmkStatus smk_operator_mean_parameter(const struct SmkOperator *op, double x, double *out);

/**
 * Weight `s_{n,k}(x)`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum SmkStatus smk_operator_weight(const struct SmkOperator *op, uint64_t k, double x, double *out);

/**
 * Creates `Y*_{m,m,a}`; defaults as in [`smk_operator_new`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum SmkStatus smk_bivariate_new(uint64_t m,
                                 double a,
                                 double tail_eps,
                                 size_t quad_points,
                                 struct SmkBivariateOperator **out);

/**
 * # Safety
 * `op` must be NULL or a handle from [`smk_bivariate_new`] not yet freed.
 */
void smk_bivariate_free(struct SmkBivariateOperator *op);

/**
 * `Y*_{m,m,a}(f; x, y)` for a caller-supplied function.
 *
 * # Safety
 * As [`smk_operator_apply`].
 */
enum SmkStatus smk_bivariate_apply(const struct SmkBivariateOperator *op,
                                   SmkBivariateCallback f,
                                   void *user_data,
                                   double x,
                                   double y,
                                   double *out);

/**
 * `Y*_{m,m,a}(f; x, y)` for a bivariate catalog function such as `"bi-default"`.
 *
 * # Safety
 * As [`smk_operator_apply_named`].
 */
enum SmkStatus smk_bivariate_apply_named(const struct SmkBivariateOperator *op,
                                         const char *name,
                                         double x,
                                         double y,
                                         double *out);

#endif  /* SMK_LAB_H */
