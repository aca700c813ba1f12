//! Sweep experiments: h x trial grids of perturb-and-re-minimize runs,
//! trial averaging, and CSV emission.
//!
//! Seeding policy: the rng for cell (h index, trial index) is a ChaCha8
//! stream derived from the master seed, with stream id
//! `(h_index << 32) | trial_index`. Adding h values or trials never
//! reshuffles the randomness of other cells, and cells may run
//! concurrently with results identical to sequential execution.

use std::io::Write;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{inclusive_steps, AnalyticPoint, AnalyticValue};
use crate::configuration::TripletMode;
use crate::error::{CvmError, Result};
use crate::minimizer::{
    run_trial, DescentParams, TrialRecord, DEFAULT_MAX_SWAP_ATTEMPTS, DEFAULT_STALL_LIMIT,
};
use crate::thermodynamics::EnthalpyForm;

/// Before or after the perturbation of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PrePerturb,
    PostPerturb,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::PrePerturb => "pre_perturb",
            Phase::PostPerturb => "post_perturb",
        }
    }
}

/// Full parameterization of a sweep experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rows: usize,
    pub cols: usize,
    pub x1_target: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h_step: f64,
    pub num_trials: u32,
    pub perturb_fraction: f64,
    pub seed: u64,
    pub triplet_mode: TripletMode,
    pub enthalpy_form: EnthalpyForm,
    pub max_swap_attempts: u32,
    pub stall_limit: u32,
    pub x1_tolerance: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rows: 16,
            cols: 16,
            x1_target: 0.35,
            h_min: 0.8,
            h_max: 1.8,
            h_step: 0.1,
            num_trials: 20,
            perturb_fraction: 0.1,
            seed: 0,
            triplet_mode: TripletMode::Horizontal,
            enthalpy_form: EnthalpyForm::CurrentDelta,
            max_swap_attempts: DEFAULT_MAX_SWAP_ATTEMPTS,
            stall_limit: DEFAULT_STALL_LIMIT,
            x1_tolerance: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(CvmError::InvalidArgument("trials must be at least 1".into()));
        }
        self.descent_params(self.h_min).validate()?;
        if self.perturb_fraction.is_nan()
            || self.perturb_fraction <= 0.0
            || self.perturb_fraction >= 1.0
        {
            return Err(CvmError::InvalidArgument(format!(
                "perturbation fraction must lie in (0, 1), got {}",
                self.perturb_fraction
            )));
        }
        inclusive_steps(self.h_min, self.h_max, self.h_step)?;
        Ok(())
    }

    pub fn h_values(&self) -> Result<Vec<f64>> {
        inclusive_steps(self.h_min, self.h_max, self.h_step)
    }

    pub fn descent_params(&self, h: f64) -> DescentParams {
        DescentParams {
            h,
            x1_target: self.x1_target,
            x1_tolerance: self.x1_tolerance,
            max_swap_attempts: self.max_swap_attempts,
            stall_limit: self.stall_limit,
            enthalpy_form: self.enthalpy_form,
            triplet_mode: self.triplet_mode,
        }
    }
}

/// Deterministic rng for one (h, trial) sweep cell.
pub fn cell_rng(master_seed: u64, h_index: usize, trial_index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((h_index as u64) << 32) | u64::from(trial_index));
    rng
}

/// Trial-averaged results for one h value and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub phase: Phase,
    pub trials: u32,
    pub x1: f64,
    pub y: [f64; 3],
    pub w: [f64; 3],
    pub z: [f64; 6],
    pub delta: f64,
    pub enthalpy: f64,
    pub neg_entropy: f64,
    pub free_energy: f64,
}

fn average_rows(h: f64, phase: Phase, records: &[TrialRecord]) -> SweepRow {
    let n = records.len() as f64;
    let mut row = SweepRow {
        h,
        phase,
        trials: records.len() as u32,
        x1: 0.0,
        y: [0.0; 3],
        w: [0.0; 3],
        z: [0.0; 6],
        delta: 0.0,
        enthalpy: 0.0,
        neg_entropy: 0.0,
        free_energy: 0.0,
    };
    for record in records {
        let state = match phase {
            Phase::PrePerturb => &record.pre_perturb,
            Phase::PostPerturb => &record.post_perturb,
        };
        row.x1 += state.x1;
        for (acc, v) in row.y.iter_mut().zip(state.fractions.y) {
            *acc += v;
        }
        for (acc, v) in row.w.iter_mut().zip(state.fractions.w) {
            *acc += v;
        }
        for (acc, v) in row.z.iter_mut().zip(state.fractions.z) {
            *acc += v;
        }
        row.delta += state.thermo.delta;
        row.enthalpy += state.thermo.enthalpy;
        row.neg_entropy += state.thermo.neg_entropy;
        row.free_energy += state.thermo.free_energy;
    }
    row.x1 /= n;
    row.y.iter_mut().for_each(|v| *v /= n);
    row.w.iter_mut().for_each(|v| *v /= n);
    row.z.iter_mut().for_each(|v| *v /= n);
    row.delta /= n;
    row.enthalpy /= n;
    row.neg_entropy /= n;
    row.free_energy /= n;
    row
}

/// Runs the full sweep. Cells execute in parallel; output is assembled in
/// (h, phase) order with pre_perturb first, so the result is deterministic
/// for a given config and seed.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let h_values = config.h_values()?;

    let cells: Vec<(usize, u32)> = (0..h_values.len())
        .flat_map(|hi| (0..config.num_trials).map(move |t| (hi, t)))
        .collect();

    let records: Vec<Result<(usize, TrialRecord)>> = cells
        .into_par_iter()
        .map(|(hi, trial)| {
            let params = config.descent_params(h_values[hi]);
            let mut rng = cell_rng(config.seed, hi, trial);
            let record =
                run_trial(config.rows, config.cols, &params, config.perturb_fraction, &mut rng)?;
            Ok((hi, record))
        })
        .collect();

    let mut per_h: Vec<Vec<TrialRecord>> = vec![Vec::new(); h_values.len()];
    for item in records {
        let (hi, record) = item?;
        per_h[hi].push(record);
    }

    let mut rows = Vec::with_capacity(2 * h_values.len());
    for (hi, h) in h_values.iter().enumerate() {
        rows.push(average_rows(*h, Phase::PrePerturb, &per_h[hi]));
        rows.push(average_rows(*h, Phase::PostPerturb, &per_h[hi]));
    }
    Ok(rows)
}

/// Renders a float with six significant digits, printf %.6g style.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let formatted = format!("{v:.5e}");
    let (mantissa, exponent) = formatted.split_once('e').expect("exponential format");
    let exponent: i32 = exponent.parse().expect("numeric exponent");
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        let plain = format!("{v:.decimals$}");
        let trimmed = plain.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "h,x1,y1,y2,y3,w1,w2,w3,z1,z2,z3,z4,z5,z6,delta,enthalpy,neg_entropy,free_energy,phase,trials";

/// Writes sweep rows in the fixed CSV schema, LF newlines.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], writer: &mut W) -> Result<()> {
    writer.write_all(SWEEP_CSV_HEADER.as_bytes())?;
    writer.write_all(b"\n")?;
    for row in rows {
        let mut fields: Vec<String> = Vec::with_capacity(20);
        fields.push(format_sig6(row.h));
        fields.push(format_sig6(row.x1));
        fields.extend(row.y.iter().map(|v| format_sig6(*v)));
        fields.extend(row.w.iter().map(|v| format_sig6(*v)));
        fields.extend(row.z.iter().map(|v| format_sig6(*v)));
        fields.push(format_sig6(row.delta));
        fields.push(format_sig6(row.enthalpy));
        fields.push(format_sig6(row.neg_entropy));
        fields.push(format_sig6(row.free_energy));
        fields.push(row.phase.as_str().to_string());
        fields.push(row.trials.to_string());
        writer.write_all(fields.join(",").as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

fn format_analytic(v: AnalyticValue) -> String {
    match v {
        AnalyticValue::Value(x) => format_sig6(x),
        AnalyticValue::Divergent => "div".to_string(),
    }
}

/// Writes the analytic comparison table, optionally joined with minimized
/// sweep z3 values at matching h (half-step matching).
pub fn write_analytic_csv<W: Write>(
    points: &[AnalyticPoint],
    joined: Option<&[(f64, f64)]>,
    h_step: f64,
    writer: &mut W,
) -> Result<()> {
    let header = if joined.is_some() {
        "h,z3_analyt1,z3_analyt2,z3_sweep"
    } else {
        "h,z3_analyt1,z3_analyt2"
    };
    writer.write_all(header.as_bytes())?;
    writer.write_all(b"\n")?;
    for point in points {
        let mut line = format!(
            "{},{},{}",
            format_sig6(point.h),
            format_analytic(point.z3_analyt1),
            format_analytic(point.z3_analyt2)
        );
        if let Some(pairs) = joined {
            let m = pairs
                .iter()
                .find(|(h, _)| (h - point.h).abs() <= h_step / 2.0)
                .map(|(_, z3)| format_sig6(*z3))
                .unwrap_or_default();
            line.push(',');
            line.push_str(&m);
        }
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
