#ifndef HELIX_EULER_H
#define HELIX_EULER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HeStatus {
  HE_STATUS_OK = 0,
  HE_STATUS_NULL_POINTER = 1,
  HE_STATUS_INVALID_ARGUMENT = 2,
  HE_STATUS_UNBALANCED = 3,
  HE_STATUS_SINGULAR = 4,
  HE_STATUS_QUADRATURE_FAILED = 5,
  HE_STATUS_NUMERICAL_FAILURE = 6,
  HE_STATUS_PANIC = 7,
} HeStatus;

typedef enum HeNormalization {
  HE_NORMALIZATION_PAPER = 0,
  HE_NORMALIZATION_PHYSICAL = 1,
} HeNormalization;

/**
 * Kernel configuration handle.
 */
typedef struct HeKernel HeKernel;

/**
 * Particle set handle.
 */
typedef struct HeParticles HeParticles;

/**
 * One slice particle: position `(z1, z2)`, circulation and area.
 */
typedef struct HeParticle {
  double z1;
  double z2;
  double gamma;
  double area;
} HeParticle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *he_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t he_last_error(char *buf, size_t len);

/**
 * Creates a kernel handle for period parameter `kappa`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the caller.
 */
enum HeStatus he_kernel_new(double kappa,
                            enum HeNormalization normalization,
                            struct HeKernel **out);

/**
 * # Safety
 * `k` must be null or a handle from [`he_kernel_new`] not yet freed.
 */
void he_kernel_free(struct HeKernel *k);

/**
 * Sets the image/series switch radius (absolute units).
 *
 * # Safety
 * `k` must be a live kernel handle.
 */
enum HeStatus he_kernel_set_switch_radius(struct HeKernel *k, double radius);

/**
 * Biot–Savart kernel at `x` into `out[3]`.
 *
 * # Safety
 * `k` must be a live handle; `x` and `out` must point to three doubles.
 */
enum HeStatus he_kernel_eval(const struct HeKernel *k, const double *x, double *out);

/**
 * Green's function by the Bessel series.
 *
 * # Safety
 * As [`he_kernel_eval`], with `out` pointing to one double.
 */
enum HeStatus he_green_series(const struct HeKernel *k, const double *x, double *out);

/**
 * Green's function by image sums.
 *
 * # Safety
 * As [`he_green_series`].
 */
enum HeStatus he_green_images(const struct HeKernel *k, const double *x, double *out);

/**
 * `|𝒦(x)| / (1/|x|² + 1/|x̃|)`.
 *
 * # Safety
 * As [`he_green_series`].
 */
enum HeStatus he_kernel_bound_ratio(const struct HeKernel *k, const double *x, double *out);

/**
 * Creates a particle set from `n` particles.
 *
 * # Safety
 * `ps` must point to `n` particles (or be null with `n == 0`); `out` must be valid.
 */
enum HeStatus he_particles_new(double kappa,
                               const struct HeParticle *ps,
                               size_t n,
                               struct HeParticles **out);

/**
 * # Safety
 * `p` must be null or a handle from [`he_particles_new`] not yet freed.
 */
void he_particles_free(struct HeParticles *p);

/**
 * Number of particles, 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t he_particles_len(const struct HeParticles *p);

/**
 * Compensated sum of the circulations, NaN for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
double he_particles_total_circulation(const struct HeParticles *p);

/**
 * Velocity of balanced particles at `n` points `xs[3n]` into `out[3n]`, with blob
 * radius `blob_epsilon` (0 for bare filaments) and relative quadrature tolerance
 * `quad_tolerance`. Results do not depend on the thread count.
 *
 * # Safety
 * `p` must be a live handle; `xs` and `out` must point to `3n` doubles.
 */
enum HeStatus he_velocity(const struct HeParticles *p,
                          double blob_epsilon,
                          double quad_tolerance,
                          const double *xs,
                          size_t n,
                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HELIX_EULER_H */
