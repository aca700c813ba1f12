/* C API for the cvm2d cluster variation method library. */

#ifndef CVM2D_H
#define CVM2D_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every API call.
typedef enum {
  CVM_STATUS_OK = 0,
  // The analytic expression has a pole at the requested point.
  CVM_STATUS_DIVERGENT = 1,
  CVM_STATUS_NULL_POINTER = 2,
  CVM_STATUS_INVALID_ARGUMENT = 3,
  CVM_STATUS_INVALID_GEOMETRY = 4,
  CVM_STATUS_INVALID_SWAP = 5,
  CVM_STATUS_OUT_OF_RANGE = 6,
  CVM_STATUS_DEGENERATE_COMPOSITION = 7,
  CVM_STATUS_PARSE_ERROR = 8,
  CVM_STATUS_IO_ERROR = 9,
  CVM_STATUS_SIZE_GUARD_EXCEEDED = 10,
} CvmStatus;

// Which triplet slots are tallied.
typedef enum {
  CVM_TRIPLET_MODE_HORIZONTAL = 0,
  CVM_TRIPLET_MODE_FULL = 1,
} CvmTripletMode;

// Which interaction enthalpy expression multiplies eps1.
typedef enum {
  CVM_ENTHALPY_FORM_PREVIOUS2Y2 = 0,
  CVM_ENTHALPY_FORM_CURRENT_DELTA = 1,
} CvmEnthalpyForm;

// Opaque grid handle.
typedef struct CvmGrid CvmGrid;

// Degeneracy-adjusted configuration fractions of one grid.
typedef struct {
  double x[2];
  double y[3];
  double w[3];
  double z[6];
  double delta;
} CvmFractions;

// Thermodynamic evaluation of one grid at one h.
typedef struct {
  double h;
  double eps1;
  double delta;
  double enthalpy;
  double neg_entropy;
  double free_energy;
} CvmThermo;

// Parameters of one swap descent. A non-positive `x1_tolerance` selects
// the default 1/(2N).
typedef struct {
  double h;
  double x1_target;
  double x1_tolerance;
  uint32_t max_swap_attempts;
  uint32_t stall_limit;
  CvmEnthalpyForm enthalpy_form;
  CvmTripletMode triplet_mode;
} CvmDescentParams;

// Final evaluation of a descent.
typedef struct {
  uint32_t attempts;
  uint32_t accepted;
  CvmFractions fractions;
  CvmThermo thermo;
} CvmDescentSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a grid with every cell independently in state A with
// probability `p_a`, deterministically from `seed`.
//
// # Safety
// `out_grid` must be a valid pointer; the result must be released with
// [`cvm_grid_free`].
CvmStatus cvm_grid_new_random(uintptr_t rows,
                              uintptr_t cols,
                              double p_a,
                              uint64_t seed,
                              CvmGrid **out_grid);

// Creates a grid from `rows * cols` bytes, each 0 (state B) or 1 (A),
// row-major.
//
// # Safety
// `states` must point to `len` readable bytes; `out_grid` must be valid.
CvmStatus cvm_grid_new_from_states(uintptr_t rows,
                                   uintptr_t cols,
                                   const uint8_t *states,
                                   uintptr_t len,
                                   CvmGrid **out_grid);

// Reads a grid file (optional `#` comments, `rows cols` header, `0`/`1`
// body).
//
// # Safety
// `path` must be a nul-terminated string; `out_grid` must be valid.
CvmStatus cvm_grid_load(const char *path, CvmGrid **out_grid);

// Writes the grid in the same text format `cvm_grid_load` reads.
//
// # Safety
// `grid` must be a live handle from this library; `path` nul-terminated.
CvmStatus cvm_grid_save(const CvmGrid *grid, const char *path);

// Releases a grid handle. Passing NULL is a no-op.
//
// # Safety
// `grid` must be NULL or a handle not already freed.
void cvm_grid_free(CvmGrid *grid);

// # Safety
// `grid` must be a live handle.
uintptr_t cvm_grid_rows(const CvmGrid *grid);

// # Safety
// `grid` must be a live handle.
uintptr_t cvm_grid_cols(const CvmGrid *grid);

// Number of units in state A.
//
// # Safety
// `grid` must be a live handle.
uintptr_t cvm_grid_a_count(const CvmGrid *grid);

// Writes 1 (state A) or 0 (state B) for the cell at `(row, col)`.
//
// # Safety
// `grid` must be a live handle and `out_state` a valid pointer.
CvmStatus cvm_grid_state(const CvmGrid *grid, uintptr_t row, uintptr_t col, uint8_t *out_state);

// Toggles one cell A <-> B.
//
// # Safety
// `grid` must be a live handle.
CvmStatus cvm_grid_flip(CvmGrid *grid, uintptr_t row, uintptr_t col);

// Exchanges an A-unit at `(row_a, col_a)` with a B-unit at
// `(row_b, col_b)`.
//
// # Safety
// `grid` must be a live handle.
CvmStatus cvm_grid_swap(CvmGrid *grid,
                        uintptr_t row_a,
                        uintptr_t col_a,
                        uintptr_t row_b,
                        uintptr_t col_b);

// Counts configuration variables and writes the degeneracy-adjusted
// fractions.
//
// # Safety
// `grid` must be a live handle and `out_fractions` a valid pointer.
CvmStatus cvm_grid_fractions(const CvmGrid *grid,
                             CvmTripletMode triplet_mode,
                             CvmFractions *out_fractions);

// Evaluates enthalpy, entropy, and free energy of the grid at `h`.
//
// # Safety
// `grid` must be a live handle and `out_thermo` a valid pointer.
CvmStatus cvm_grid_thermo(const CvmGrid *grid,
                          double h,
                          CvmEnthalpyForm enthalpy_form,
                          CvmTripletMode triplet_mode,
                          CvmThermo *out_thermo);

// Closed-form equilibrium z3 under the previous (2y2) enthalpy form.
// Returns `Divergent` and writes NaN at poles of the expression.
//
// # Safety
// `out_z3` must be a valid pointer.
CvmStatus cvm_z3_previous(double h, double *out_z3);

// Closed-form equilibrium z3 under the current (delta) enthalpy form.
//
// # Safety
// `out_z3` must be a valid pointer.
CvmStatus cvm_z3_current(double h, double *out_z3);

// Randomly flips units of the over-represented state until x1 is within
// `x1_tolerance` of `x1_target` (non-positive tolerance selects the
// 1/(2N) default). Writes the number of flips performed.
//
// # Safety
// `grid` must be a live handle; `out_flips` may be NULL.
CvmStatus cvm_adjust_x1(CvmGrid *grid,
                        double x1_target,
                        double x1_tolerance,
                        uint64_t seed,
                        uint32_t *out_flips);

// Runs the x1-preserving stochastic swap descent, mutating the grid
// toward lower free energy, and writes a summary of the final state.
//
// # Safety
// `grid` must be a live handle; `params` and `out_summary` valid
// pointers.
CvmStatus cvm_descend(CvmGrid *grid,
                      const CvmDescentParams *params,
                      uint64_t seed,
                      CvmDescentSummary *out_summary);

// Toggles `round(fraction * N)` distinct units chosen uniformly without
// replacement; writes how many were toggled.
//
// # Safety
// `grid` must be a live handle; `out_toggled` may be NULL.
CvmStatus cvm_perturb(CvmGrid *grid, double fraction, uint64_t seed, uintptr_t *out_toggled);

// Static name for a status code (never NULL).
const char *cvm_status_name(CvmStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CVM2D_H */
