#ifndef TORUS_COHOMOLOGY_H
#define TORUS_COHOMOLOGY_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes shared by every entry point.
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  // Generic failure inside the library.
  TC_STATUS_ERROR = 1,
  // Resonance, small divisor or another obstruction verdict.
  TC_STATUS_OBSTRUCTED = 2,
  TC_STATUS_INVALID_ARGUMENT = 3,
  TC_STATUS_NULL_POINTER = 4,
  TC_STATUS_PARSE_ERROR = 5,
  TC_STATUS_PANIC = 6,
} TcStatus;

// Real or complex Fourier series on `T^d`.
typedef struct TcSeries TcSeries;

// Output of the cohomological equation solver.
typedef struct TcSolution TcSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next call into the library from the same thread.
const char *tc_last_error(void);

// Library version as a static NUL-terminated string.
const char *tc_version(void);

// Parses `{"dim", "real", "coeffs": [{"k", "re", "im"}]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum TcStatus tc_series_from_json(const char *json, struct TcSeries **out);

// Serializes a series; free the string with [`tc_string_free`].
//
// # Safety
// `series` must be a live handle and `out` a writable pointer.
enum TcStatus tc_series_to_json(const struct TcSeries *series, char **out);

// # Safety
// `s` must come from this library and not have been freed.
void tc_string_free(char *s);

// # Safety
// `series` must be null or a handle not yet freed.
void tc_series_free(struct TcSeries *series);

// Dimension of the torus, or 0 for a null handle.
//
// # Safety
// `series` must be null or a live handle.
size_t tc_series_dim(const struct TcSeries *series);

// Evaluates a real series at `theta[0..len]`.
//
// # Safety
// `theta` must hold `len` doubles and `out` be writable.
enum TcStatus tc_series_evaluate(const struct TcSeries *series,
                                 const double *theta,
                                 size_t len,
                                 double *out);

// Solves `u∘R_α - u = ξ - c` (`flow == 0`) or `X_α u = ξ - c` (otherwise).
// A solution with resonant modes is still returned, with status
// `Obstructed`.
//
// # Safety
// `alpha` must hold `len` doubles; `xi` must be live and `out` writable.
enum TcStatus tc_solve(const struct TcSeries *xi,
                       const double *alpha,
                       size_t len,
                       double divisor_floor,
                       int32_t flow,
                       struct TcSolution **out);

// Copies the transfer function out of a solution.
//
// # Safety
// `solution` must be live and `out` writable.
enum TcStatus tc_solution_transfer(const struct TcSolution *solution, struct TcSeries **out);

// The mean `c(ξ)` removed before solving; NaN for a null handle.
//
// # Safety
// `solution` must be null or live.
double tc_solution_mean(const struct TcSolution *solution);

// # Safety
// `solution` must be null or live.
size_t tc_solution_resonant_count(const struct TcSolution *solution);

// # Safety
// `solution` must be null or a handle not yet freed.
void tc_solution_free(struct TcSolution *solution);

// Scans `0 < |p|∞ <= radius` for `|p·α| >= C |p|∞^-τ`. Writes the worst
// margin and whether the bound held; a failed bound is not an error.
//
// # Safety
// `alpha` must hold `len` doubles; `worst_margin` and `holds` must be writable.
enum TcStatus tc_check_diophantine(const double *alpha,
                                   size_t len,
                                   double c,
                                   double tau,
                                   uint64_t radius,
                                   double *worst_margin,
                                   bool *holds);

// `⟨T_m, ψ⟩` for the map `(x, y) ↦ (x + ρ, y + n₀x + β)`, with the
// truncation chosen to cover the support of `ψ`.
//
// # Safety
// `psi` must be live; `re` and `im` writable.
enum TcStatus tc_tm_pair(int64_t m,
                         int64_t n0,
                         double rho,
                         double beta,
                         const struct TcSeries *psi,
                         double *re,
                         double *im);

// Finite-time Lyapunov exponent of the constant cocycle `(x, v) ↦ (x + ρ, Mv)`
// with `M = [[m[0], m[1]], [m[2], m[3]]]`.
//
// # Safety
// `matrix` must hold 4 doubles and `out` be writable.
enum TcStatus tc_lyapunov(double rho, const double *matrix, double x0, uint64_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_COHOMOLOGY_H */
