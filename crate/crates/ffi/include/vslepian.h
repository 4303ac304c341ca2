#ifndef VSLEPIAN_H
#define VSLEPIAN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum VslStatus {
  VSL_STATUS_OK = 0,
  VSL_STATUS_NULL_POINTER = 1,
  VSL_STATUS_DOMAIN = 2,
  VSL_STATUS_INDEX_OUT_OF_RANGE = 3,
  VSL_STATUS_NUMERICAL = 4,
  VSL_STATUS_PARSE = 5,
  VSL_STATUS_IO = 6,
  VSL_STATUS_BUFFER_TOO_SMALL = 7,
  VSL_STATUS_PANIC = 8,
} VslStatus;

// Part of coefficient space.
typedef enum VslPart {
  VSL_PART_RADIAL = 0,
  VSL_PART_TANGENTIAL = 1,
  VSL_PART_FULL = 2,
} VslPart;

// Opaque Slepian basis handle.
typedef struct VslBasis VslBasis;

// Opaque region handle.
typedef struct VslRegion VslRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL.
//
// # Safety
//
// `buf` is null or valid for `len` bytes.
size_t vsl_last_error_message(char *buf, size_t len);

// Normalized Legendre function `X_lm(theta)`.
//
// # Safety
//
// `out` is null or valid for one write.
enum VslStatus vsl_xlm(uint32_t l, int32_t m, double theta, double *out);

// Wigner 3-j symbol; zero for disallowed couplings.
double vsl_wigner3j(uint32_t l1, uint32_t l2, uint32_t l3, int32_t m1, int32_t m2, int32_t m3);

// Shannon numbers `dim · area / 4π` of a region of the given area.
//
// # Safety
//
// Output pointers are null or valid for one write.
enum VslStatus vsl_shannon_predicted(double area,
                                     uint32_t l_max,
                                     double *total,
                                     double *radial,
                                     double *tangential);

// New polar cap of colatitude radius `theta`.
//
// # Safety
//
// `out` is null or valid for one write.
enum VslStatus vsl_region_polar_cap(double theta, struct VslRegion **out);

// New polygon union. `lonlat_deg` holds `(lon, lat)` pairs in degrees for
// all rings back to back; ring `i` has `ring_sizes[i]` vertices.
//
// # Safety
//
// `ring_sizes` holds `n_rings` values and `lonlat_deg` twice their sum; `out` is valid for one write.
enum VslStatus vsl_region_polygons(const double *lonlat_deg,
                                   const size_t *ring_sizes,
                                   size_t n_rings,
                                   struct VslRegion **out);

// Releases a region; null is ignored.
//
// # Safety
//
// `region` is null or a live handle from this library; it must not be used afterwards.
void vsl_region_free(struct VslRegion *region);

// Region area in steradians.
//
// # Safety
//
// `region` is null or a live handle; `out` is null or valid for one write.
enum VslStatus vsl_region_area(const struct VslRegion *region, double *out);

// Membership of the point `(theta, phi)`.
//
// # Safety
//
// `region` is null or a live handle; `out` is null or valid for one write.
enum VslStatus vsl_region_contains(const struct VslRegion *region,
                                   double theta,
                                   double phi,
                                   bool *out);

// Mixed-order polar-cap basis from the analytic per-order kernels.
//
// # Safety
//
// `out` is null or valid for one write.
enum VslStatus vsl_basis_polar_cap(double theta,
                                   uint32_t l_max,
                                   enum VslPart part,
                                   struct VslBasis **out);

// Basis of any region from the quadrature-assembled kernel.
//
// # Safety
//
// `region` is null or a live handle; `out` is null or valid for one write.
enum VslStatus vsl_basis_region(const struct VslRegion *region,
                                uint32_t l_max,
                                enum VslPart part,
                                struct VslBasis **out);

// Releases a basis; null is ignored.
//
// # Safety
//
// `basis` is null or a live handle from this library; it must not be used afterwards.
void vsl_basis_free(struct VslBasis *basis);

// Number of columns; 0 for null.
//
// # Safety
//
// `basis` is null or a live handle.
size_t vsl_basis_len(const struct VslBasis *basis);

// Length of each column; 0 for null.
//
// # Safety
//
// `basis` is null or a live handle.
size_t vsl_basis_dim(const struct VslBasis *basis);

// Concentration factor of column `alpha` (zero-based).
//
// # Safety
//
// `basis` is null or a live handle; `out` is null or valid for one write.
enum VslStatus vsl_basis_eigenvalue(const struct VslBasis *basis, size_t alpha, double *out);

// Copies column `alpha` (zero-based, canonical layout) into `buf`, which
// must hold `vsl_basis_dim` values.
//
// # Safety
//
// `basis` is null or a live handle; `buf` is null or valid for `len` values.
enum VslStatus vsl_basis_column(const struct VslBasis *basis,
                                size_t alpha,
                                double *buf,
                                size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VSLEPIAN_H */
