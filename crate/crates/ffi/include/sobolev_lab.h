#ifndef SOBOLEV_LAB_H
#define SOBOLEV_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_NOT_TANGENT = 3,
  SL_STATUS_NOT_ON_MANIFOLD = 4,
  SL_STATUS_OUT_OF_DOMAIN = 5,
  SL_STATUS_SINGULARITY = 6,
  SL_STATUS_RESOLUTION = 7,
  SL_STATUS_DIMENSION_MISMATCH = 8,
  SL_STATUS_CONTRACT = 9,
  SL_STATUS_DEGENERATE_METRIC = 10,
  SL_STATUS_GRID_MISMATCH = 11,
  SL_STATUS_PARSE = 12,
  SL_STATUS_IO = 13,
  SL_STATUS_PANIC = 14,
} SlStatus;

/*
 Distance selector for [`sl_map_distance`].
 */
typedef enum SlDistanceKind {
  SL_DISTANCE_KIND_SASAKI = 0,
  SL_DISTANCE_KIND_CHEEGER_GROMOLL = 1,
  SL_DISTANCE_KIND_IOTA = 2,
  SL_DISTANCE_KIND_CHIRON = 3,
  SL_DISTANCE_KIND_DOT = 4,
} SlDistanceKind;

/*
 Opaque Riemannian model.
 */
typedef struct SlManifold SlManifold;

/*
 Opaque sampled map between manifolds.
 */
typedef struct SlMap SlMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL after a success.
 The pointer stays valid until the next call into this library.
 */
const char *sl_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/*
 Builds a manifold from a description such as `sphere(2)`, `circle`,
 `euclidean(3)`, `interval(0,1)`, `rectangle(0,1,0,2)` or `disk(1.5)`.

 # Safety
 `description` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SlStatus sl_manifold_parse(const char *description, struct SlManifold **out);

/*
 # Safety
 `m` must come from [`sl_manifold_parse`] and not be used afterwards.
 */
void sl_manifold_free(struct SlManifold *m);

/*
 Length of the coordinate arrays for points of `m`; 0 for NULL.

 # Safety
 `m` must be NULL or a live handle.
 */
size_t sl_manifold_ambient_dim(const struct SlManifold *m);

/*
 # Safety
 `m` must be NULL or a live handle.
 */
size_t sl_manifold_intrinsic_dim(const struct SlManifold *m);

/*
 exp_x(v), written to `out`. All arrays have the ambient dimension.

 # Safety
 Pointers must be valid for `sl_manifold_ambient_dim(m)` doubles.
 */
enum SlStatus sl_manifold_exp(const struct SlManifold *m,
                              const double *x,
                              const double *v,
                              double *out);

/*
 log_x(y), written to `out`.

 # Safety
 Pointers must be valid for `sl_manifold_ambient_dim(m)` doubles.
 */
enum SlStatus sl_manifold_log(const struct SlManifold *m,
                              const double *x,
                              const double *y,
                              double *out);

/*
 Geodesic distance between two points of `m`.

 # Safety
 `x`, `y` must be valid for `sl_manifold_ambient_dim(m)` doubles.
 */
enum SlStatus sl_manifold_distance(const struct SlManifold *m,
                                   const double *x,
                                   const double *y,
                                   double *out);

/*
 Parallel transport of v ∈ T_xN to T_yN along the minimizing geodesic.

 # Safety
 Pointers must be valid for `sl_manifold_ambient_dim(m)` doubles.
 */
enum SlStatus sl_manifold_transport(const struct SlManifold *m,
                                    const double *x,
                                    const double *y,
                                    const double *v,
                                    double *out);

/*
 G^λ of a tangent vector given through its invariants: the horizontal
 square norm and the fiber products ⟨k,k⟩, ⟨k,e⟩, ⟨e,e⟩.

 # Safety
 `out` must be a valid pointer.
 */
enum SlStatus sl_lambda_metric(double lambda,
                               double horizontal,
                               double kk,
                               double ke,
                               double ee,
                               double *out);

/*
 Map on the interval [a, b] with `nodes` equispaced nodes into `target`.
 `values` holds `nodes * sl_manifold_ambient_dim(target)` doubles.

 # Safety
 `values` must be valid for that many doubles; `out` a valid pointer.
 */
enum SlStatus sl_map_new_interval(double a,
                                  double b,
                                  size_t nodes,
                                  const struct SlManifold *target,
                                  const double *values,
                                  struct SlMap **out);

/*
 Reads a map written by [`sl_map_save_csv`] or the command-line tool.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SlStatus sl_map_load_csv(const char *path, struct SlMap **out);

/*
 # Safety
 `u` must be a live handle and `path` a NUL-terminated string.
 */
enum SlStatus sl_map_save_csv(const struct SlMap *u, const char *path);

/*
 # Safety
 `u` must come from this library and not be used afterwards.
 */
void sl_map_free(struct SlMap *u);

/*
 Number of grid nodes; 0 for NULL.

 # Safety
 `u` must be NULL or a live handle.
 */
size_t sl_map_len(const struct SlMap *u);

/*
 E_p(u) = ∫|du|^p.

 # Safety
 `u` must be a live handle and `out` a valid pointer.
 */
enum SlStatus sl_map_energy(const struct SlMap *u, double p, double *out);

/*
 Sobolev distance of the chosen kind. `is_upper_bound` (optional) is set
 to 1 when the value is a competitor length rather than the distance.

 # Safety
 `u`, `v` must be live handles; `out` valid; `is_upper_bound` NULL or valid.
 */
enum SlStatus sl_map_distance(const struct SlMap *u,
                              const struct SlMap *v,
                              enum SlDistanceKind kind,
                              double p,
                              double *out,
                              int32_t *is_upper_bound);

/*
 ∫ d(u, v) / (1 + d(u, v)).

 # Safety
 `u`, `v` must be live handles and `out` a valid pointer.
 */
enum SlStatus sl_map_measure_distance(const struct SlMap *u, const struct SlMap *v, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOBOLEV_LAB_H */
