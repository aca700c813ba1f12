//! Two-stage minimization protocol: drive x1 to a target by directed random
//! flips, then minimize free energy by x1-preserving stochastic swaps,
//! keeping a swap only when it strictly lowers G. Includes the
//! perturb-and-re-minimize trial driver.

use rand::Rng;

use crate::configuration::{count_configs, ConfigCounts, ConfigFractions, TripletMode};
use crate::error::{CvmError, Result};
use crate::lattice::{CellState, Grid};
use crate::thermodynamics::{free_energy, EnthalpyForm, ThermoState};

pub const DEFAULT_MAX_SWAP_ATTEMPTS: u32 = 4000;
pub const DEFAULT_STALL_LIMIT: u32 = 400;

/// Parameters of one descent run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentParams {
    pub h: f64,
    pub x1_target: f64,
    /// Fractional tolerance on x1; `None` means 1/(2N), i.e. exact to the
    /// nearest achievable unit count.
    pub x1_tolerance: Option<f64>,
    pub max_swap_attempts: u32,
    /// Consecutive rejected swaps that end the descent.
    pub stall_limit: u32,
    pub enthalpy_form: EnthalpyForm,
    pub triplet_mode: TripletMode,
}

impl DescentParams {
    pub fn new(h: f64, x1_target: f64) -> Self {
        Self {
            h,
            x1_target,
            x1_tolerance: None,
            max_swap_attempts: DEFAULT_MAX_SWAP_ATTEMPTS,
            stall_limit: DEFAULT_STALL_LIMIT,
            enthalpy_form: EnthalpyForm::default(),
            triplet_mode: TripletMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x1_target.is_nan() || self.x1_target <= 0.0 || self.x1_target >= 1.0 {
            return Err(CvmError::InvalidArgument(format!(
                "x1 target must lie in (0, 1), got {}",
                self.x1_target
            )));
        }
        if let Some(tol) = self.x1_tolerance {
            if tol.is_nan() || tol <= 0.0 {
                return Err(CvmError::InvalidArgument(format!(
                    "x1 tolerance must be positive, got {tol}"
                )));
            }
        }
        if self.h.is_nan() || self.h <= 0.0 {
            return Err(CvmError::InvalidArgument(format!("h must be positive, got {}", self.h)));
        }
        if self.max_swap_attempts == 0 || self.stall_limit == 0 {
            return Err(CvmError::InvalidArgument(
                "swap attempt and stall limits must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Effective fractional tolerance for a grid of `n` units.
    pub fn tolerance_for(&self, n: usize) -> f64 {
        self.x1_tolerance.unwrap_or(1.0 / (2.0 * n as f64))
    }
}

/// One swap attempt in a descent trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub attempt: u32,
    pub accepted: bool,
    /// Free energy after the keep-or-revert decision.
    pub free_energy: f64,
}

/// Full record of one descent: the attempt log plus the final evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentTrace {
    pub steps: Vec<TraceStep>,
    pub accepted: u32,
    pub fractions: ConfigFractions,
    pub thermo: ThermoState,
}

/// Randomly flips units of the over-represented state until x1 is within
/// tolerance of the target. Terminates in at most N flips.
pub fn adjust_x1<R: Rng + ?Sized>(
    grid: &mut Grid,
    x1_target: f64,
    x1_tolerance: f64,
    rng: &mut R,
) -> Result<u32> {
    if x1_target.is_nan() || x1_target <= 0.0 || x1_target >= 1.0 {
        return Err(CvmError::InvalidArgument(format!(
            "x1 target must lie in (0, 1), got {x1_target}"
        )));
    }
    if x1_tolerance.is_nan() || x1_tolerance <= 0.0 {
        return Err(CvmError::InvalidArgument(format!(
            "x1 tolerance must be positive, got {x1_tolerance}"
        )));
    }
    let n = grid.n_units();
    let mut flips = 0u32;
    loop {
        let x1 = grid.a_count() as f64 / n as f64;
        if (x1 - x1_target).abs() <= x1_tolerance {
            return Ok(flips);
        }
        let over = if x1 > x1_target { CellState::A } else { CellState::B };
        let candidates = grid.indices_in_state(over);
        let idx = candidates[rng.random_range(0..candidates.len())];
        grid.flip_flat(idx);
        flips += 1;
    }
}

/// Stochastic swap descent at fixed composition. Repeats: pick a uniformly
/// random A-unit and B-unit, swap, re-evaluate, keep iff the free energy is
/// strictly lower. Stops after `max_swap_attempts` or `stall_limit`
/// consecutive rejections.
pub fn descend<R: Rng + ?Sized>(
    grid: &mut Grid,
    params: &DescentParams,
    rng: &mut R,
) -> Result<DescentTrace> {
    params.validate()?;
    let mut a_cells = grid.indices_in_state(CellState::A);
    let mut b_cells = grid.indices_in_state(CellState::B);
    if a_cells.is_empty() {
        return Err(CvmError::DegenerateComposition('A'));
    }
    if b_cells.is_empty() {
        return Err(CvmError::DegenerateComposition('B'));
    }

    let mut counts = count_configs(grid, params.triplet_mode);
    let mut current = evaluate(&counts, params)?;
    let mut steps = Vec::new();
    let mut accepted = 0u32;
    let mut stall = 0u32;

    for attempt in 0..params.max_swap_attempts {
        if stall >= params.stall_limit {
            break;
        }
        let pa = rng.random_range(0..a_cells.len());
        let pb = rng.random_range(0..b_cells.len());
        let ia = a_cells[pa];
        let ib = b_cells[pb];

        let (ra, ca) = grid.position(ia);
        let (rb, cb) = grid.position(ib);
        counts.apply_flip(grid, ra, ca);
        counts.apply_flip(grid, rb, cb);
        let candidate = evaluate(&counts, params)?;

        let keep = candidate.1.free_energy < current.1.free_energy;
        if keep {
            current = candidate;
            a_cells[pa] = ib;
            b_cells[pb] = ia;
            accepted += 1;
            stall = 0;
        } else {
            counts.apply_flip(grid, rb, cb);
            counts.apply_flip(grid, ra, ca);
            stall += 1;
        }
        steps.push(TraceStep { attempt, accepted: keep, free_energy: current.1.free_energy });
    }

    debug_assert_eq!(counts, count_configs(grid, params.triplet_mode));
    Ok(DescentTrace { steps, accepted, fractions: current.0, thermo: current.1 })
}

fn evaluate(counts: &ConfigCounts, params: &DescentParams) -> Result<(ConfigFractions, ThermoState)> {
    let fractions = counts.to_fractions()?;
    let thermo = free_energy(&fractions, params.h, params.enthalpy_form)?;
    Ok((fractions, thermo))
}

/// Toggles exactly `round(fraction * N)` distinct units, chosen uniformly
/// without replacement. Returns the number of units toggled (0 is a no-op
/// the caller may want to warn about). x1 is free to drift; re-run
/// [`adjust_x1`] before descending again.
pub fn perturb<R: Rng + ?Sized>(grid: &mut Grid, fraction: f64, rng: &mut R) -> Result<usize> {
    if fraction.is_nan() || fraction <= 0.0 || fraction >= 1.0 {
        return Err(CvmError::InvalidArgument(format!(
            "perturbation fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n = grid.n_units();
    let count = (fraction * n as f64).round() as usize;
    for idx in rand::seq::index::sample(rng, n, count) {
        grid.flip_flat(idx);
    }
    Ok(count)
}

/// Evaluation of a grid at one point of the trial pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialState {
    pub x1: f64,
    pub fractions: ConfigFractions,
    pub thermo: ThermoState,
}

/// Outcome of one generate / adjust / descend / perturb / adjust / descend
/// trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub pre_perturb: TrialState,
    pub post_perturb: TrialState,
    pub pre_trace: DescentTrace,
    pub post_trace: DescentTrace,
    pub perturbed_units: usize,
}

/// Runs the full perturb-and-re-minimize protocol on a freshly generated
/// grid, entirely driven by `rng`.
pub fn run_trial<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    params: &DescentParams,
    perturb_fraction: f64,
    rng: &mut R,
) -> Result<TrialRecord> {
    params.validate()?;
    let mut grid = Grid::random(rows, cols, params.x1_target, rng)?;
    let tolerance = params.tolerance_for(grid.n_units());

    adjust_x1(&mut grid, params.x1_target, tolerance, rng)?;
    let pre_trace = descend(&mut grid, params, rng)?;
    let pre_perturb = TrialState {
        x1: grid.x1(),
        fractions: pre_trace.fractions,
        thermo: pre_trace.thermo,
    };

    let perturbed_units = perturb(&mut grid, perturb_fraction, rng)?;
    adjust_x1(&mut grid, params.x1_target, tolerance, rng)?;
    let post_trace = descend(&mut grid, params, rng)?;
    let post_perturb = TrialState {
        x1: grid.x1(),
        fractions: post_trace.fractions,
        thermo: post_trace.thermo,
    };

    Ok(TrialRecord { pre_perturb, post_perturb, pre_trace, post_trace, perturbed_units })
}
