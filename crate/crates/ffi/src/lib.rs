//! C ABI for the cvm2d library.
//!
//! Grids are opaque handles created and freed here; every function returns
//! a [`CvmStatus`] code and writes results through out-pointers. Stochastic
//! operations take an explicit seed so bindings stay deterministic. The
//! C header is generated into `include/cvm2d.h` at build time.

use std::ffi::{c_char, CStr};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::ptr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvm2d::analytic::AnalyticValue;
use cvm2d::configuration::{count_configs, ConfigFractions, TripletMode};
use cvm2d::error::CvmError;
use cvm2d::lattice::{CellState, Grid};
use cvm2d::minimizer::{adjust_x1, descend, perturb, DescentParams};
use cvm2d::thermodynamics::{free_energy, EnthalpyForm, ThermoState};

/// Result code of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvmStatus {
    Ok = 0,
    /// The analytic expression has a pole at the requested point.
    Divergent = 1,
    NullPointer = 2,
    InvalidArgument = 3,
    InvalidGeometry = 4,
    InvalidSwap = 5,
    OutOfRange = 6,
    DegenerateComposition = 7,
    ParseError = 8,
    IoError = 9,
    SizeGuardExceeded = 10,
}

impl From<&CvmError> for CvmStatus {
    fn from(err: &CvmError) -> Self {
        match err {
            CvmError::InvalidGeometry(_) => CvmStatus::InvalidGeometry,
            CvmError::InvalidArgument(_) => CvmStatus::InvalidArgument,
            CvmError::InvalidSwap(..) => CvmStatus::InvalidSwap,
            CvmError::OutOfRange(..) => CvmStatus::OutOfRange,
            CvmError::DegenerateComposition(_) => CvmStatus::DegenerateComposition,
            CvmError::Parse { .. } => CvmStatus::ParseError,
            CvmError::Io(_) => CvmStatus::IoError,
            CvmError::OracleSizeExceeded { .. } => CvmStatus::SizeGuardExceeded,
        }
    }
}

/// Which triplet slots are tallied.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvmTripletMode {
    Horizontal = 0,
    Full = 1,
}

impl From<CvmTripletMode> for TripletMode {
    fn from(value: CvmTripletMode) -> Self {
        match value {
            CvmTripletMode::Horizontal => TripletMode::Horizontal,
            CvmTripletMode::Full => TripletMode::Full,
        }
    }
}

/// Which interaction enthalpy expression multiplies eps1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvmEnthalpyForm {
    Previous2y2 = 0,
    CurrentDelta = 1,
}

impl From<CvmEnthalpyForm> for EnthalpyForm {
    fn from(value: CvmEnthalpyForm) -> Self {
        match value {
            CvmEnthalpyForm::Previous2y2 => EnthalpyForm::Previous2y2,
            CvmEnthalpyForm::CurrentDelta => EnthalpyForm::CurrentDelta,
        }
    }
}

/// Opaque grid handle.
pub struct CvmGrid {
    inner: Grid,
}

/// Degeneracy-adjusted configuration fractions of one grid.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CvmFractions {
    pub x: [f64; 2],
    pub y: [f64; 3],
    pub w: [f64; 3],
    pub z: [f64; 6],
    pub delta: f64,
}

impl From<&ConfigFractions> for CvmFractions {
    fn from(f: &ConfigFractions) -> Self {
        Self { x: f.x, y: f.y, w: f.w, z: f.z, delta: f.delta() }
    }
}

/// Thermodynamic evaluation of one grid at one h.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CvmThermo {
    pub h: f64,
    pub eps1: f64,
    pub delta: f64,
    pub enthalpy: f64,
    pub neg_entropy: f64,
    pub free_energy: f64,
}

impl From<&ThermoState> for CvmThermo {
    fn from(t: &ThermoState) -> Self {
        Self {
            h: t.h,
            eps1: t.eps1,
            delta: t.delta,
            enthalpy: t.enthalpy,
            neg_entropy: t.neg_entropy,
            free_energy: t.free_energy,
        }
    }
}

/// Parameters of one swap descent. A non-positive `x1_tolerance` selects
/// the default 1/(2N).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CvmDescentParams {
    pub h: f64,
    pub x1_target: f64,
    pub x1_tolerance: f64,
    pub max_swap_attempts: u32,
    pub stall_limit: u32,
    pub enthalpy_form: CvmEnthalpyForm,
    pub triplet_mode: CvmTripletMode,
}

/// Final evaluation of a descent.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CvmDescentSummary {
    pub attempts: u32,
    pub accepted: u32,
    pub fractions: CvmFractions,
    pub thermo: CvmThermo,
}

fn grid_out(result: Result<Grid, CvmError>, out: *mut *mut CvmGrid) -> CvmStatus {
    match result {
        Ok(grid) => {
            let handle = Box::new(CvmGrid { inner: grid });
            unsafe { *out = Box::into_raw(handle) };
            CvmStatus::Ok
        }
        Err(err) => {
            unsafe { *out = ptr::null_mut() };
            CvmStatus::from(&err)
        }
    }
}

unsafe fn path_from(ptr: *const c_char) -> Result<String, CvmStatus> {
    if ptr.is_null() {
        return Err(CvmStatus::NullPointer);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| CvmStatus::InvalidArgument)
}

/// Creates a grid with every cell independently in state A with
/// probability `p_a`, deterministically from `seed`.
///
/// # Safety
/// `out_grid` must be a valid pointer; the result must be released with
/// [`cvm_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_new_random(
    rows: usize,
    cols: usize,
    p_a: f64,
    seed: u64,
    out_grid: *mut *mut CvmGrid,
) -> CvmStatus {
    if out_grid.is_null() {
        return CvmStatus::NullPointer;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid_out(Grid::random(rows, cols, p_a, &mut rng), out_grid)
}

/// Creates a grid from `rows * cols` bytes, each 0 (state B) or 1 (A),
/// row-major.
///
/// # Safety
/// `states` must point to `len` readable bytes; `out_grid` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_new_from_states(
    rows: usize,
    cols: usize,
    states: *const u8,
    len: usize,
    out_grid: *mut *mut CvmGrid,
) -> CvmStatus {
    if out_grid.is_null() || states.is_null() {
        return CvmStatus::NullPointer;
    }
    let raw = std::slice::from_raw_parts(states, len);
    let mut cells = Vec::with_capacity(len);
    for &b in raw {
        match b {
            0 => cells.push(CellState::B),
            1 => cells.push(CellState::A),
            _ => {
                *out_grid = ptr::null_mut();
                return CvmStatus::InvalidArgument;
            }
        }
    }
    grid_out(Grid::from_states(rows, cols, cells), out_grid)
}

/// Reads a grid file (optional `#` comments, `rows cols` header, `0`/`1`
/// body).
///
/// # Safety
/// `path` must be a nul-terminated string; `out_grid` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_load(
    path: *const c_char,
    out_grid: *mut *mut CvmGrid,
) -> CvmStatus {
    if out_grid.is_null() {
        return CvmStatus::NullPointer;
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let result = File::open(&path)
        .map_err(CvmError::from)
        .and_then(|f| Grid::load(BufReader::new(f)));
    grid_out(result, out_grid)
}

/// Writes the grid in the same text format `cvm_grid_load` reads.
///
/// # Safety
/// `grid` must be a live handle from this library; `path` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_save(grid: *const CvmGrid, path: *const c_char) -> CvmStatus {
    let Some(grid) = grid.as_ref() else {
        return CvmStatus::NullPointer;
    };
    let path = match path_from(path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let result = File::create(&path).map_err(CvmError::from).and_then(|f| {
        let mut writer = BufWriter::new(f);
        grid.inner.save(&mut writer)
    });
    match result {
        Ok(()) => CvmStatus::Ok,
        Err(err) => CvmStatus::from(&err),
    }
}

/// Releases a grid handle. Passing NULL is a no-op.
///
/// # Safety
/// `grid` must be NULL or a handle not already freed.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_free(grid: *mut CvmGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_rows(grid: *const CvmGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.rows())
}

/// # Safety
/// `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_cols(grid: *const CvmGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.cols())
}

/// Number of units in state A.
///
/// # Safety
/// `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_a_count(grid: *const CvmGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.a_count())
}

/// Writes 1 (state A) or 0 (state B) for the cell at `(row, col)`.
///
/// # Safety
/// `grid` must be a live handle and `out_state` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_state(
    grid: *const CvmGrid,
    row: usize,
    col: usize,
    out_state: *mut u8,
) -> CvmStatus {
    let Some(grid) = grid.as_ref() else {
        return CvmStatus::NullPointer;
    };
    if out_state.is_null() {
        return CvmStatus::NullPointer;
    }
    if row >= grid.inner.rows() || col >= grid.inner.cols() {
        return CvmStatus::OutOfRange;
    }
    *out_state = match grid.inner.state(row, col) {
        CellState::A => 1,
        CellState::B => 0,
    };
    CvmStatus::Ok
}

/// Toggles one cell A <-> B.
///
/// # Safety
/// `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_flip(grid: *mut CvmGrid, row: usize, col: usize) -> CvmStatus {
    let Some(grid) = grid.as_mut() else {
        return CvmStatus::NullPointer;
    };
    match grid.inner.flip_unit(row, col) {
        Ok(()) => CvmStatus::Ok,
        Err(err) => CvmStatus::from(&err),
    }
}

/// Exchanges an A-unit at `(row_a, col_a)` with a B-unit at
/// `(row_b, col_b)`.
///
/// # Safety
/// `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_swap(
    grid: *mut CvmGrid,
    row_a: usize,
    col_a: usize,
    row_b: usize,
    col_b: usize,
) -> CvmStatus {
    let Some(grid) = grid.as_mut() else {
        return CvmStatus::NullPointer;
    };
    match grid.inner.swap_pair((row_a, col_a), (row_b, col_b)) {
        Ok(()) => CvmStatus::Ok,
        Err(err) => CvmStatus::from(&err),
    }
}

/// Counts configuration variables and writes the degeneracy-adjusted
/// fractions.
///
/// # Safety
/// `grid` must be a live handle and `out_fractions` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_fractions(
    grid: *const CvmGrid,
    triplet_mode: CvmTripletMode,
    out_fractions: *mut CvmFractions,
) -> CvmStatus {
    let Some(grid) = grid.as_ref() else {
        return CvmStatus::NullPointer;
    };
    if out_fractions.is_null() {
        return CvmStatus::NullPointer;
    }
    match count_configs(&grid.inner, triplet_mode.into()).to_fractions() {
        Ok(f) => {
            *out_fractions = CvmFractions::from(&f);
            CvmStatus::Ok
        }
        Err(err) => CvmStatus::from(&err),
    }
}

/// Evaluates enthalpy, entropy, and free energy of the grid at `h`.
///
/// # Safety
/// `grid` must be a live handle and `out_thermo` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvm_grid_thermo(
    grid: *const CvmGrid,
    h: f64,
    enthalpy_form: CvmEnthalpyForm,
    triplet_mode: CvmTripletMode,
    out_thermo: *mut CvmThermo,
) -> CvmStatus {
    let Some(grid) = grid.as_ref() else {
        return CvmStatus::NullPointer;
    };
    if out_thermo.is_null() {
        return CvmStatus::NullPointer;
    }
    let result = count_configs(&grid.inner, triplet_mode.into())
        .to_fractions()
        .and_then(|f| free_energy(&f, h, enthalpy_form.into()));
    match result {
        Ok(t) => {
            *out_thermo = CvmThermo::from(&t);
            CvmStatus::Ok
        }
        Err(err) => CvmStatus::from(&err),
    }
}

fn z3_out(value: Result<AnalyticValue, CvmError>, out_z3: *mut f64) -> CvmStatus {
    match value {
        Ok(AnalyticValue::Value(v)) => {
            unsafe { *out_z3 = v };
            CvmStatus::Ok
        }
        Ok(AnalyticValue::Divergent) => {
            unsafe { *out_z3 = f64::NAN };
            CvmStatus::Divergent
        }
        Err(err) => CvmStatus::from(&err),
    }
}

/// Closed-form equilibrium z3 under the previous (2y2) enthalpy form.
/// Returns `Divergent` and writes NaN at poles of the expression.
///
/// # Safety
/// `out_z3` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvm_z3_previous(h: f64, out_z3: *mut f64) -> CvmStatus {
    if out_z3.is_null() {
        return CvmStatus::NullPointer;
    }
    z3_out(cvm2d::analytic::z3_previous(h), out_z3)
}

/// Closed-form equilibrium z3 under the current (delta) enthalpy form.
///
/// # Safety
/// `out_z3` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvm_z3_current(h: f64, out_z3: *mut f64) -> CvmStatus {
    if out_z3.is_null() {
        return CvmStatus::NullPointer;
    }
    z3_out(cvm2d::analytic::z3_current(h), out_z3)
}

/// Randomly flips units of the over-represented state until x1 is within
/// `x1_tolerance` of `x1_target` (non-positive tolerance selects the
/// 1/(2N) default). Writes the number of flips performed.
///
/// # Safety
/// `grid` must be a live handle; `out_flips` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn cvm_adjust_x1(
    grid: *mut CvmGrid,
    x1_target: f64,
    x1_tolerance: f64,
    seed: u64,
    out_flips: *mut u32,
) -> CvmStatus {
    let Some(grid) = grid.as_mut() else {
        return CvmStatus::NullPointer;
    };
    let tolerance = if x1_tolerance > 0.0 {
        x1_tolerance
    } else {
        1.0 / (2.0 * grid.inner.n_units() as f64)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match adjust_x1(&mut grid.inner, x1_target, tolerance, &mut rng) {
        Ok(flips) => {
            if !out_flips.is_null() {
                *out_flips = flips;
            }
            CvmStatus::Ok
        }
        Err(err) => CvmStatus::from(&err),
    }
}

/// Runs the x1-preserving stochastic swap descent, mutating the grid
/// toward lower free energy, and writes a summary of the final state.
///
/// # Safety
/// `grid` must be a live handle; `params` and `out_summary` valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn cvm_descend(
    grid: *mut CvmGrid,
    params: *const CvmDescentParams,
    seed: u64,
    out_summary: *mut CvmDescentSummary,
) -> CvmStatus {
    let Some(grid) = grid.as_mut() else {
        return CvmStatus::NullPointer;
    };
    let Some(params) = params.as_ref() else {
        return CvmStatus::NullPointer;
    };
    if out_summary.is_null() {
        return CvmStatus::NullPointer;
    }
    let descent = DescentParams {
        h: params.h,
        x1_target: params.x1_target,
        x1_tolerance: (params.x1_tolerance > 0.0).then_some(params.x1_tolerance),
        max_swap_attempts: params.max_swap_attempts,
        stall_limit: params.stall_limit,
        enthalpy_form: params.enthalpy_form.into(),
        triplet_mode: params.triplet_mode.into(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match descend(&mut grid.inner, &descent, &mut rng) {
        Ok(trace) => {
            *out_summary = CvmDescentSummary {
                attempts: trace.steps.len() as u32,
                accepted: trace.accepted,
                fractions: CvmFractions::from(&trace.fractions),
                thermo: CvmThermo::from(&trace.thermo),
            };
            CvmStatus::Ok
        }
        Err(err) => CvmStatus::from(&err),
    }
}

/// Toggles `round(fraction * N)` distinct units chosen uniformly without
/// replacement; writes how many were toggled.
///
/// # Safety
/// `grid` must be a live handle; `out_toggled` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn cvm_perturb(
    grid: *mut CvmGrid,
    fraction: f64,
    seed: u64,
    out_toggled: *mut usize,
) -> CvmStatus {
    let Some(grid) = grid.as_mut() else {
        return CvmStatus::NullPointer;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match perturb(&mut grid.inner, fraction, &mut rng) {
        Ok(toggled) => {
            if !out_toggled.is_null() {
                *out_toggled = toggled;
            }
            CvmStatus::Ok
        }
        Err(err) => CvmStatus::from(&err),
    }
}

/// Static name for a status code (never NULL).
#[no_mangle]
pub extern "C" fn cvm_status_name(status: CvmStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        CvmStatus::Ok => b"ok\0",
        CvmStatus::Divergent => b"divergent\0",
        CvmStatus::NullPointer => b"null pointer\0",
        CvmStatus::InvalidArgument => b"invalid argument\0",
        CvmStatus::InvalidGeometry => b"invalid geometry\0",
        CvmStatus::InvalidSwap => b"invalid swap\0",
        CvmStatus::OutOfRange => b"out of range\0",
        CvmStatus::DegenerateComposition => b"degenerate composition\0",
        CvmStatus::ParseError => b"parse error\0",
        CvmStatus::IoError => b"io error\0",
        CvmStatus::SizeGuardExceeded => b"size guard exceeded\0",
    };
    name.as_ptr().cast()
}
