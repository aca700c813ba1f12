//! Closed-form equilibrium z3(h) for the equiprobable case, for both
//! enthalpy formulations, with divergence detection.
//!
//! Current form: z3 = (h^4 - 3)(h^4 + 1) / (8 [h^8 - 6 h^4 + 1]);
//! previous form: z3 = (h^2 - 3)(h^2 + 1) / (8 [h^4 - 6 h^2 + 1]).
//! A point is marked divergent when the raw denominator magnitude drops
//! below [`DIVERGENCE_TOLERANCE`]. The current form diverges near
//! h = 0.6436 and h = 1.5538 (h^4 = 3 -/+ 2*sqrt(2)).

use crate::error::{CvmError, Result};

/// Raw-denominator threshold below which a point is reported divergent.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-9;

/// A closed-form value, or a marker for a pole of the expression.
/// Divergence is a value, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticValue {
    Value(f64),
    Divergent,
}

impl AnalyticValue {
    pub fn value(self) -> Option<f64> {
        match self {
            AnalyticValue::Value(v) => Some(v),
            AnalyticValue::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, AnalyticValue::Divergent)
    }
}

/// One row of the analytic comparison table. `z3_analyt1` is the current
/// (delta-form) solution, `z3_analyt2` the previous (2y2-form) one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticPoint {
    pub h: f64,
    pub z3_analyt1: AnalyticValue,
    pub z3_analyt2: AnalyticValue,
}

fn check_h(h: f64) -> Result<()> {
    if h.is_nan() || h <= 0.0 {
        return Err(CvmError::InvalidArgument(format!("h must be positive, got {h}")));
    }
    Ok(())
}

fn rational(u: f64) -> AnalyticValue {
    let raw_denominator = u * u - 6.0 * u + 1.0;
    if raw_denominator.abs() < DIVERGENCE_TOLERANCE {
        AnalyticValue::Divergent
    } else {
        AnalyticValue::Value((u - 3.0) * (u + 1.0) / (8.0 * raw_denominator))
    }
}

/// Equilibrium z3 under the previous enthalpy form (eps1 * 2y2).
pub fn z3_previous(h: f64) -> Result<AnalyticValue> {
    check_h(h)?;
    Ok(rational(h * h))
}

/// Equilibrium z3 under the current enthalpy form (eps1 * (2y2 - y1 - y3)).
pub fn z3_current(h: f64) -> Result<AnalyticValue> {
    check_h(h)?;
    Ok(rational(h * h * h * h))
}

/// Inclusive arithmetic sweep `min, min + step, ...` accepting `max` up to
/// half a step beyond the last exact multiple.
pub fn inclusive_steps(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    let bad = |v: f64| v.is_nan();
    if bad(min) || bad(max) || bad(step) || min <= 0.0 || max < min || step <= 0.0 {
        return Err(CvmError::InvalidArgument(format!(
            "invalid sweep range: min {min}, max {max}, step {step}"
        )));
    }
    let mut values = Vec::new();
    let mut k = 0u32;
    loop {
        let v = min + f64::from(k) * step;
        if v > max + step / 2.0 {
            break;
        }
        values.push(v);
        k += 1;
    }
    Ok(values)
}

/// Evaluates both closed forms over an inclusive h sweep.
pub fn analytic_table(h_min: f64, h_max: f64, h_step: f64) -> Result<Vec<AnalyticPoint>> {
    inclusive_steps(h_min, h_max, h_step)?
        .into_iter()
        .map(|h| {
            Ok(AnalyticPoint {
                h,
                z3_analyt1: z3_current(h)?,
                z3_analyt2: z3_previous(h)?,
            })
        })
        .collect()
}
