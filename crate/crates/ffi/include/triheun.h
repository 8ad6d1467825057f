#ifndef TRIHEUN_H
#define TRIHEUN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Mirror of the coordinate-map cases.
typedef enum TriheunCase {
  TRIHEUN_CASE_DELTA_NEG_B2_POS = 0,
  TRIHEUN_CASE_DELTA_ZERO_B1_POS = 1,
  TRIHEUN_CASE_DELTA_ZERO_B1_NEG = 2,
  TRIHEUN_CASE_DELTA_ZERO_B0B1_ZERO = 3,
  TRIHEUN_CASE_DELTA_POS_B2_POS = 4,
  TRIHEUN_CASE_DELTA_POS_B2_NEG = 5,
  TRIHEUN_CASE_LINEAR_B2_ZERO = 6,
  TRIHEUN_CASE_LINEAR_B0B2_ZERO = 7,
  TRIHEUN_CASE_CONSTANT_B1B2_ZERO = 8,
} TriheunCase;

// Which Taylor solution of the canonical equation to evaluate.
typedef enum TriheunSeries {
  // `y(0) = 1, y'(0) = 0`.
  TRIHEUN_SERIES_T1 = 0,
  // `y(0) = 0, y'(0) = 1`.
  TRIHEUN_SERIES_T2 = 1,
} TriheunSeries;

typedef enum TriheunStatus {
  TRIHEUN_STATUS_OK = 0,
  TRIHEUN_STATUS_NULL_POINTER = 1,
  TRIHEUN_STATUS_INVALID_PARAMS = 2,
  TRIHEUN_STATUS_DOMAIN = 3,
  TRIHEUN_STATUS_NO_CONVERGENCE = 4,
  TRIHEUN_STATUS_SINGULAR = 5,
  TRIHEUN_STATUS_BUFFER_TOO_SMALL = 6,
  TRIHEUN_STATUS_NUMERICAL = 7,
  TRIHEUN_STATUS_PANIC = 99,
} TriheunStatus;

// Coordinate map for one parameter set.
typedef struct TriheunMap TriheunMap;

// Radial wavefunction built on a map at a fixed energy.
typedef struct TriheunWavefunction TriheunWavefunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into the library on the same thread.
const char *triheun_last_error(void);

// Builds the coordinate map for `I0 = a0 + a1 ρ + a2 ρ²`, `I1 = b0 + b1 ρ + b2 ρ²`.
//
// # Safety
// `a` and `b` point to three doubles each; `out` is writable.
enum TriheunStatus triheun_map_new(const double *a, const double *b, struct TriheunMap **out);

// # Safety
// `map` is null or came from [`triheun_map_new`] and has not been freed.
void triheun_map_free(struct TriheunMap *map);

// # Safety
// `map` is a live handle; `out` is writable.
enum TriheunStatus triheun_map_case(const struct TriheunMap *map, enum TriheunCase *out);

// Open ρ-interval where `I1 > 0`; infinite ends are reported as ±infinity.
//
// # Safety
// `map` is a live handle; `lo` and `hi` are writable.
enum TriheunStatus triheun_map_rho_domain(const struct TriheunMap *map, double *lo, double *hi);

// # Safety
// `map` is a live handle; `lo` and `hi` are writable.
enum TriheunStatus triheun_map_r_domain(const struct TriheunMap *map, double *lo, double *hi);

// `r(ρ)`.
//
// # Safety
// `map` is a live handle; `out` is writable.
enum TriheunStatus triheun_map_forward(const struct TriheunMap *map, double rho, double *out);

// `ρ(r)`.
//
// # Safety
// `map` is a live handle; `out` is writable.
enum TriheunStatus triheun_map_inverse(const struct TriheunMap *map, double r, double *out);

// Effective potential at radius `r`.
//
// # Safety
// `map` is a live handle; `out` is writable.
enum TriheunStatus triheun_map_potential(const struct TriheunMap *map, double r, double *out);

// Wavefunction `c1 T1 + c2 T2` dressed by the map prefactor at `energy`.
// The map is copied, so the map handle may be freed afterwards.
//
// # Safety
// `map` is a live handle; `out` is writable.
enum TriheunStatus triheun_wavefunction_new(const struct TriheunMap *map,
                                            double energy,
                                            double c1,
                                            double c2,
                                            struct TriheunWavefunction **out);

// # Safety
// `psi` is null or came from [`triheun_wavefunction_new`] and has not been freed.
void triheun_wavefunction_free(struct TriheunWavefunction *psi);

// # Safety
// `psi` is a live handle; `out` is writable.
enum TriheunStatus triheun_wavefunction_eval(const struct TriheunWavefunction *psi,
                                             double r,
                                             double *out);

// Value of a Taylor solution of `y'' - (γ + 3ρ²) y' + (α + (β - 3) ρ) y = 0`.
//
// # Safety
// `out` is writable.
enum TriheunStatus triheun_series_eval(double alpha,
                                       double beta,
                                       double gamma,
                                       enum TriheunSeries which,
                                       double rho,
                                       double *out);

// Energy of the order-`n` polynomial state, `(3(n+1) - a1) / b1`.
//
// # Safety
// `out` is writable.
enum TriheunStatus triheun_qes_energy(double a1, double b1, size_t n, double *out);

// Coefficients `w_0 .. w_n` (ascending, `w_n = 1`) of the polynomial solution at
// `β = 3(n+1)`. `(α, γ)` must lie on the order-`n` constraint curve.
// `len` is the capacity of `coeffs` and must be at least `n + 1`.
//
// # Safety
// `coeffs` points to `len` writable doubles.
enum TriheunStatus triheun_qes_polynomial(double alpha,
                                          double gamma,
                                          size_t n,
                                          double *coeffs,
                                          size_t len);

// Level with `n` nodes of `-v'' + (9/4 ρ⁴ - a2 ρ² - a1 ρ - a0) v = E v` on the real line.
//
// # Safety
// `a` points to three doubles; `out` is writable.
enum TriheunStatus triheun_quartic_level(const double *a, size_t n, double *out);

// Library version as a static NUL-terminated string.
const char *triheun_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TRIHEUN_H */
