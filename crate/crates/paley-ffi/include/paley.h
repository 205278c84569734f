/* C interface to the paley dyadic-analysis toolkit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum PaleyStatus {
  PALEY_STATUS_OK = 0,
  PALEY_STATUS_INVALID_PARAMETER = 1,
  PALEY_STATUS_INVALID_INPUT = 2,
  PALEY_STATUS_PRECONDITION = 3,
  PALEY_STATUS_NUMERICAL = 4,
  PALEY_STATUS_NULL_POINTER = 5,
  PALEY_STATUS_BUFFER_TOO_SMALL = 6,
  PALEY_STATUS_UTF8 = 7,
  PALEY_STATUS_IO = 8,
  PALEY_STATUS_PANIC = 9,
} PaleyStatus;

/**
 * Opaque complex field handle.
 */
typedef struct PaleyField PaleyField;

/**
 * Opaque periodic grid handle.
 */
typedef struct PaleyGrid PaleyGrid;

/**
 * Opaque dyadic partition handle.
 */
typedef struct PaleyPartition PaleyPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static name of a status code (never null, do not free).
 */
const char *paley_status_name(enum PaleyStatus status);

/**
 * Creates a periodic grid with `dim` axes of `size` points each.
 *
 * # Safety
 * `out` must be a valid pointer; the handle must be released with
 * [`paley_grid_free`].
 */
enum PaleyStatus paley_grid_new(uintptr_t dim, uintptr_t size, struct PaleyGrid **out);

/**
 * Releases a grid handle; a null pointer is a no-op.
 *
 * # Safety
 * `grid` must come from [`paley_grid_new`] and not be used afterwards.
 */
void paley_grid_free(struct PaleyGrid *grid);

/**
 * Number of samples (and lattice frequencies) of the grid.
 *
 * # Safety
 * `grid` must be a live handle.
 */
uintptr_t paley_grid_num_points(const struct PaleyGrid *grid);

/**
 * Builds a field from `2 * num_points` interleaved `re, im` doubles.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` must be valid. The
 * handle must be released with [`paley_field_free`].
 */
enum PaleyStatus paley_field_from_samples(const struct PaleyGrid *grid,
                                          const double *samples,
                                          uintptr_t len,
                                          struct PaleyField **out);

/**
 * Releases a field handle; a null pointer is a no-op.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void paley_field_free(struct PaleyField *field);

/**
 * Copies the field's samples as interleaved `re, im` doubles.
 *
 * # Safety
 * `buffer` must have room for `cap` doubles; `cap` must be at least
 * `2 * num_points`.
 */
enum PaleyStatus paley_field_copy_samples(const struct PaleyField *field,
                                          double *buffer,
                                          uintptr_t cap);

/**
 * `L^p` norm of a field under the probability measure; `p` may be
 * `INFINITY`.
 *
 * # Safety
 * `field` must be a live handle and `out` a valid pointer.
 */
enum PaleyStatus paley_lp_norm(const struct PaleyField *field, double p, double *out);

/**
 * Applies the fractional Laplacian multiplier `|xi|^(2 alpha)`.
 *
 * # Safety
 * `field` must be a live handle; `out` receives a new handle.
 */
enum PaleyStatus paley_frac_laplacian(const struct PaleyField *field,
                                      double alpha,
                                      struct PaleyField **out);

/**
 * Builds the potential `-L^alpha(u)/u` of a non-vanishing field.
 *
 * # Safety
 * `field` must be a live handle; `out` receives a new handle.
 */
enum PaleyStatus paley_manufacture_potential(const struct PaleyField *field,
                                             double alpha,
                                             double floor,
                                             struct PaleyField **out);

/**
 * Smooth radial cutoff field: 1 on `B(rho)` around `center`, 0 outside
 * `B(2 rho)`.
 *
 * # Safety
 * `center` must point to `center_len` doubles matching the grid dimension.
 */
enum PaleyStatus paley_cutoff_field(const struct PaleyGrid *grid,
                                    double rho,
                                    const double *center,
                                    uintptr_t center_len,
                                    struct PaleyField **out);

/**
 * Builds the dyadic partition of a grid.
 *
 * # Safety
 * `grid` must be a live handle; release the result with
 * [`paley_partition_free`].
 */
enum PaleyStatus paley_partition_new(const struct PaleyGrid *grid, struct PaleyPartition **out);

/**
 * Releases a partition handle; a null pointer is a no-op.
 *
 * # Safety
 * `partition` must come from [`paley_partition_new`].
 */
void paley_partition_free(struct PaleyPartition *partition);

/**
 * Highest band index of the partition.
 *
 * # Safety
 * `partition` must be a live handle.
 */
uintptr_t paley_partition_j_max(const struct PaleyPartition *partition);

/**
 * Band projection `P_j f` for `1 <= j <= j_max`.
 *
 * # Safety
 * Handles must be live; `out` receives a new field handle.
 */
enum PaleyStatus paley_project(const struct PaleyPartition *partition,
                               const struct PaleyField *field,
                               uintptr_t j,
                               struct PaleyField **out);

/**
 * Low-block projection.
 *
 * # Safety
 * Handles must be live; `out` receives a new field handle.
 */
enum PaleyStatus paley_project_low(const struct PaleyPartition *partition,
                                   const struct PaleyField *field,
                                   struct PaleyField **out);

/**
 * Dyadic Sobolev norm at regularity `s`.
 *
 * # Safety
 * Handles must be live and `out` valid.
 */
enum PaleyStatus paley_sobolev_norm(const struct PaleyPartition *partition,
                                    const struct PaleyField *field,
                                    double s,
                                    double *out);

/**
 * Writes the weighted coefficient sequence `a_k = 2^(sk) ||P_k f||_2`
 * (low-block norm at index 0) into `buffer` and the entry count into
 * `written`.
 *
 * # Safety
 * `buffer` must hold `cap` doubles with `cap >= j_max + 1`.
 */
enum PaleyStatus paley_dyadic_coefficients(const struct PaleyPartition *partition,
                                           const struct PaleyField *field,
                                           double s,
                                           double *buffer,
                                           uintptr_t cap,
                                           uintptr_t *written);

/**
 * Bernstein ratio `||f||_q / (2^(n j (1/p - 1/q)) ||f||_p)` for a field
 * with spectrum in `B(2^j)`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid.
 */
enum PaleyStatus paley_bernstein_ratio(const struct PaleyField *field,
                                       double p,
                                       double q,
                                       int32_t j,
                                       double *out);

/**
 * Decay exponent `theta(n, alpha, s)` of the bootstrap machinery.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PaleyStatus paley_theta(uintptr_t n, double alpha, double s, double *out);

/**
 * Calibrates the supercritical-family amplitude by the radial oracle;
 * writes the amplitude and the residual at it.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum PaleyStatus paley_calibrate_amplitude(uintptr_t n,
                                           double p,
                                           double *out_amplitude,
                                           double *out_residual);

/**
 * Checks the iteration-lemma hypotheses on a sequence.
 *
 * # Safety
 * `sequence` must point to `len` doubles; `out` must be valid.
 */
enum PaleyStatus paley_iteration_check(double epsilon,
                                       double delta,
                                       uintptr_t s_start,
                                       const double *sequence,
                                       uintptr_t len,
                                       bool *out);

/**
 * Computes the explicit decay constant `M` (and verifies the conclusion)
 * for a hypothesis-satisfying sequence.
 *
 * # Safety
 * `sequence` must point to `len` doubles; outputs must be valid.
 */
enum PaleyStatus paley_iteration_bound(double epsilon,
                                       double delta,
                                       uintptr_t s_start,
                                       const double *sequence,
                                       uintptr_t len,
                                       double *out_decay_constant,
                                       bool *out_conclusion_holds);

/**
 * Runs the fixed-point oracle and fills `buffer` with the resulting
 * hypothesis-satisfying sequence of length `k_max`.
 *
 * # Safety
 * `buffer` must hold `cap >= k_max` doubles.
 */
enum PaleyStatus paley_fixed_point_oracle(double epsilon,
                                          double delta,
                                          uintptr_t k_max,
                                          uintptr_t iters,
                                          double *buffer,
                                          uintptr_t cap);

/**
 * Runs the full bootstrap pipeline from a flat `key = value` configuration
 * string and returns the JSON report; free it with [`paley_string_free`].
 *
 * # Safety
 * `config` must be a null-terminated string (may be empty for defaults);
 * `out_json` must be valid.
 */
enum PaleyStatus paley_run_bootstrap_json(const char *config, char **out_json);

/**
 * Frees a string returned by this library; a null pointer is a no-op.
 *
 * # Safety
 * `s` must come from [`paley_run_bootstrap_json`] and not be used again.
 */
void paley_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
