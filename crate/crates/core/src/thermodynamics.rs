//! Enthalpy, configurational entropy, and free energy per unit, with
//! k_B*T fixed at 1.
//!
//! The interaction parameter `h` maps to the pair enthalpy coefficient as
//! eps1 = ln(h) / 2, so h = 1 means zero interaction, h > 1 favors
//! like-near-like. Entropy is the cluster bracket
//! `2 sum(beta Lf(y)) + sum(beta Lf(w)) - sum(Lf(x)) - 2 sum(gamma Lf(z))`
//! with `Lf(v) = v ln v`, `Lf(0) = 0`; it evaluates to ln 2 for the fully
//! random equiprobable distribution and to 0 for fully ordered grids.

use crate::configuration::{ConfigFractions, PAIR_DEGENERACY, TRIPLET_DEGENERACY};
use crate::error::{CvmError, Result};

/// Which interaction enthalpy expression multiplies eps1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnthalpyForm {
    /// eps1 * 2*y2, the earlier formulation.
    Previous2y2,
    /// eps1 * (2*y2 - y1 - y3), the current formulation.
    #[default]
    CurrentDelta,
}

impl EnthalpyForm {
    pub fn as_str(self) -> &'static str {
        match self {
            EnthalpyForm::Previous2y2 => "2y2",
            EnthalpyForm::CurrentDelta => "delta",
        }
    }
}

/// Thermodynamic evaluation of one grid at one `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub h: f64,
    pub eps1: f64,
    pub enthalpy_form: EnthalpyForm,
    pub enthalpy: f64,
    pub neg_entropy: f64,
    pub free_energy: f64,
    pub delta: f64,
}

/// eps1 = ln(h) / 2; strictly increasing, zero at h = 1.
pub fn eps_from_h(h: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(CvmError::InvalidArgument(format!("h must be positive, got {h}")));
    }
    Ok(0.5 * h.ln())
}

/// Interaction enthalpy per unit via the y-route.
pub fn enthalpy(f: &ConfigFractions, eps1: f64, form: EnthalpyForm) -> f64 {
    match form {
        EnthalpyForm::Previous2y2 => eps1 * (2.0 * f.y[1]),
        EnthalpyForm::CurrentDelta => eps1 * f.delta(),
    }
}

/// The same enthalpy through the triplet identities
/// (2*y2 = z2 + z3 + z4 + z5 and 2*y2 - y1 - y3 = z3 + z4 - z1 - z6);
/// agrees with [`enthalpy`] to 1e-12 on any real grid.
pub fn enthalpy_z_form(f: &ConfigFractions, eps1: f64, form: EnthalpyForm) -> f64 {
    match form {
        EnthalpyForm::Previous2y2 => eps1 * (f.z[1] + f.z[2] + f.z[3] + f.z[4]),
        EnthalpyForm::CurrentDelta => eps1 * (f.z[2] + f.z[3] - f.z[0] - f.z[5]),
    }
}

fn lf(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

/// Configurational entropy per unit.
pub fn entropy(f: &ConfigFractions) -> Result<f64> {
    if !f.all_in_unit_interval() {
        return Err(CvmError::InvalidArgument(
            "configuration fractions must lie in [0, 1]".into(),
        ));
    }
    let sy: f64 = f.y.iter().zip(PAIR_DEGENERACY).map(|(&v, d)| d * lf(v)).sum();
    let sw: f64 = f.w.iter().zip(PAIR_DEGENERACY).map(|(&v, d)| d * lf(v)).sum();
    let sx: f64 = f.x.iter().map(|&v| lf(v)).sum();
    let sz: f64 = f.z.iter().zip(TRIPLET_DEGENERACY).map(|(&v, d)| d * lf(v)).sum();
    // grouped so the y/z and w/x sums cancel exactly for fully ordered grids
    Ok(2.0 * (sy - sz) + (sw - sx))
}

/// Assembles the full thermodynamic state; free energy = enthalpy - entropy.
pub fn free_energy(f: &ConfigFractions, h: f64, form: EnthalpyForm) -> Result<ThermoState> {
    let eps1 = eps_from_h(h)?;
    let enthalpy = enthalpy(f, eps1, form);
    let s = entropy(f)?;
    Ok(ThermoState {
        h,
        eps1,
        enthalpy_form: form,
        enthalpy,
        neg_entropy: -s,
        free_energy: enthalpy - s,
        delta: f.delta(),
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::configuration::{fractions, TripletMode};
    use crate::lattice::{CellState, Grid};

    /// Fractions of the ideal fully random equiprobable distribution.
    fn equiprobable_fractions() -> ConfigFractions {
        ConfigFractions {
            x: [0.5, 0.5],
            y: [0.25, 0.25, 0.25],
            w: [0.25, 0.25, 0.25],
            z: [0.125; 6],
        }
    }

    fn row_alternating_4x4() -> Grid {
        let states = (0..16)
            .map(|i| if (i / 4) % 2 == 0 { CellState::A } else { CellState::B })
            .collect();
        Grid::from_states(4, 4, states).unwrap()
    }

    #[test]
    fn eps_anchors() {
        assert_eq!(eps_from_h(1.0).unwrap(), 0.0);
        assert!(eps_from_h(0.8).unwrap() < 0.0);
        assert!((eps_from_h(std::f64::consts::E.powi(2)).unwrap() - 1.0).abs() < 1e-12);
        assert!(eps_from_h(0.0).is_err());
        assert!(eps_from_h(-1.0).is_err());
        assert!(eps_from_h(f64::NAN).is_err());
    }

    #[test]
    fn enthalpy_anchors() {
        let all_a = Grid::uniform(4, 4, CellState::A).unwrap();
        let f = fractions(&all_a, TripletMode::Horizontal).unwrap();
        assert_eq!(enthalpy(&f, 0.0, EnthalpyForm::CurrentDelta), 0.0);
        let eps1 = eps_from_h(1.5).unwrap();
        assert!((enthalpy(&f, eps1, EnthalpyForm::CurrentDelta) - (-eps1)).abs() < 1e-15);

        let alt = fractions(&row_alternating_4x4(), TripletMode::Horizontal).unwrap();
        assert!((enthalpy(&alt, eps1, EnthalpyForm::CurrentDelta) - eps1).abs() < 1e-15);
        assert!((enthalpy(&alt, eps1, EnthalpyForm::Previous2y2) - eps1).abs() < 1e-15);
    }

    #[test]
    fn enthalpy_routes_agree_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let eps1 = eps_from_h(1.3).unwrap();
        for _ in 0..50 {
            let g = Grid::random(8, 8, 0.4, &mut rng).unwrap();
            let f = fractions(&g, TripletMode::Horizontal).unwrap();
            for form in [EnthalpyForm::Previous2y2, EnthalpyForm::CurrentDelta] {
                let via_y = enthalpy(&f, eps1, form);
                let via_z = enthalpy_z_form(&f, eps1, form);
                assert!((via_y - via_z).abs() <= 1e-12, "{via_y} vs {via_z}");
            }
        }
    }

    #[test]
    fn entropy_anchors() {
        let s = entropy(&equiprobable_fractions()).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-12);

        let all_a = fractions(&Grid::uniform(4, 4, CellState::A).unwrap(), TripletMode::Horizontal)
            .unwrap();
        assert_eq!(entropy(&all_a).unwrap(), 0.0);

        let alt = fractions(&row_alternating_4x4(), TripletMode::Horizontal).unwrap();
        assert_eq!(entropy(&alt).unwrap(), 0.0);
    }

    #[test]
    fn entropy_rejects_out_of_range_fractions() {
        let mut f = equiprobable_fractions();
        f.z[0] = 1.5;
        assert!(entropy(&f).is_err());
        f.z[0] = -0.1;
        assert!(entropy(&f).is_err());
    }

    #[test]
    fn entropy_ensemble_mean_near_ln2() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut sum = 0.0;
        let grids = 50;
        for _ in 0..grids {
            let g = Grid::random(16, 16, 0.5, &mut rng).unwrap();
            sum += entropy(&fractions(&g, TripletMode::Horizontal).unwrap()).unwrap();
        }
        let mean = sum / grids as f64;
        assert!((mean - std::f64::consts::LN_2).abs() < 0.02, "mean entropy {mean}");
    }

    #[test]
    fn entropy_invariant_under_global_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let g = Grid::random(8, 8, 0.3, &mut rng).unwrap();
            let mirrored = Grid::from_states(
                8,
                8,
                g.cells().iter().map(|s| s.flipped()).collect(),
            )
            .unwrap();
            let s = entropy(&fractions(&g, TripletMode::Horizontal).unwrap()).unwrap();
            let sm = entropy(&fractions(&mirrored, TripletMode::Horizontal).unwrap()).unwrap();
            assert!((s - sm).abs() < 1e-12);
        }
    }

    #[test]
    fn free_energy_assembles_consistently() {
        let f = equiprobable_fractions();
        let t = free_energy(&f, 1.0, EnthalpyForm::CurrentDelta).unwrap();
        assert!((t.free_energy - (-std::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(t.free_energy, t.enthalpy + t.neg_entropy);

        let all_a = fractions(&Grid::uniform(4, 4, CellState::A).unwrap(), TripletMode::Horizontal)
            .unwrap();
        let t = free_energy(&all_a, 1.5, EnthalpyForm::CurrentDelta).unwrap();
        assert!((t.free_energy - (-t.eps1)).abs() < 1e-15);

        assert!(free_energy(&f, 0.0, EnthalpyForm::CurrentDelta).is_err());
    }
}
