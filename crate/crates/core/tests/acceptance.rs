//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `--nocapture` to see them).
//!
//! Desk scale throughout: 16x16 grids, 20 trials, fixed seed 0.
//!
//! Criteria 5, 6 and 8 contain sub-assertions that fail under the pinned
//! design (eps1 = ln(h)/2, strictly-lower greedy swap descent): the
//! converged minima of this free energy sit away from the quoted values,
//! which trace back to the original code's search artifacts. The
//! assertions are kept exactly as stated rather than loosened; the
//! failures below are measured, reproducible, and documented.

use std::sync::LazyLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvm2d::analytic::{z3_current, z3_previous, AnalyticValue};
use cvm2d::configuration::{count_configs, fractions, TripletMode};
use cvm2d::experiment::{cell_rng, run_sweep, write_sweep_csv, Phase, RunConfig, SweepRow};
use cvm2d::lattice::{CellState, Grid};
use cvm2d::minimizer::{adjust_x1, descend, run_trial, TrialRecord};
use cvm2d::oracle::brute_force_count;
use cvm2d::thermodynamics::{enthalpy, enthalpy_z_form, entropy, eps_from_h, EnthalpyForm};

const LN_2: f64 = std::f64::consts::LN_2;

struct SweepFixture {
    config: RunConfig,
    rows: Vec<SweepRow>,
    /// Per h value: the 20 trial records, produced with the same per-cell
    /// rng streams the sweep uses.
    records: Vec<(f64, Vec<TrialRecord>)>,
}

/// The reference-reproduction sweep at x1 = 0.35, shared by criteria 5, 7, 8.
static SWEEP_035: LazyLock<SweepFixture> = LazyLock::new(|| {
    let config = RunConfig::default();
    let rows = run_sweep(&config).expect("sweep runs");
    let h_values = config.h_values().expect("valid range");
    let records = h_values
        .iter()
        .enumerate()
        .map(|(hi, &h)| {
            let trials = (0..config.num_trials)
                .map(|t| {
                    let mut rng = cell_rng(config.seed, hi, t);
                    run_trial(
                        config.rows,
                        config.cols,
                        &config.descent_params(h),
                        config.perturb_fraction,
                        &mut rng,
                    )
                    .expect("trial runs")
                })
                .collect();
            (h, trials)
        })
        .collect();
    SweepFixture { config, rows, records }
});

fn post_row(fixture: &SweepFixture, h: f64) -> &SweepRow {
    fixture
        .rows
        .iter()
        .find(|r| r.phase == Phase::PostPerturb && (r.h - h).abs() < 1e-9)
        .expect("post row present")
}

fn row_alternating_16x16() -> Grid {
    let states = (0..256)
        .map(|i| if (i / 16) % 2 == 0 { CellState::A } else { CellState::B })
        .collect();
    Grid::from_states(16, 16, states).unwrap()
}

struct Checks {
    label: &'static str,
    failures: Vec<String>,
}

impl Checks {
    fn new(label: &'static str) -> Self {
        Self { label, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("acceptance {}: PASS", self.label);
        } else {
            println!("acceptance {}: FAIL", self.label);
            for f in &self.failures {
                println!("  - {f}");
            }
            panic!("{} failed: {:?}", self.label, self.failures);
        }
    }
}

#[test]
fn criterion_1_analytic_anchors() {
    let mut checks = Checks::new("criterion 1 (analytic anchors)");

    let prev1 = z3_previous(1.0).unwrap().value().unwrap();
    let cur1 = z3_current(1.0).unwrap().value().unwrap();
    checks.check((prev1 - 0.125).abs() <= 1e-12, format!("z3_previous(1) = {prev1}"));
    checks.check((cur1 - 0.125).abs() <= 1e-12, format!("z3_current(1) = {cur1}"));

    // poles of h^8 - 6h^4 + 1
    let spread = 2.0 * std::f64::consts::SQRT_2;
    let low = (3.0 - spread).powf(0.25);
    let high = (3.0 + spread).powf(0.25);
    checks.check(
        z3_current(low).unwrap().is_divergent() && (low - 0.644).abs() <= 0.002,
        format!("low divergence at {low}, expected within 0.002 of 0.644"),
    );
    checks.check(
        z3_current(high).unwrap().is_divergent() && (high - 1.554).abs() <= 0.002,
        format!("high divergence at {high}, expected within 0.002 of 1.554"),
    );

    // no spurious divergence flags elsewhere
    for k in 0..=1000 {
        let h = 0.5 + k as f64 * 0.0015;
        if (h - low).abs() > 0.002 && (h - high).abs() > 0.002 {
            checks.check(
                !z3_current(h).unwrap().is_divergent(),
                format!("unexpected divergence flag at h = {h}"),
            );
        }
    }
    checks.finish();
}

#[test]
fn criterion_2_oracle_equivalence() {
    let mut checks = Checks::new("criterion 2 (oracle equivalence, 300 grids x 2 modes)");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut grids_checked = 0;
    for (rows, cols) in [(4, 4), (6, 6), (8, 8)] {
        for _ in 0..100 {
            let p = 0.2 + 0.6 * (grids_checked % 7) as f64 / 7.0;
            let grid = Grid::random(rows, cols, p, &mut rng).unwrap();
            grids_checked += 1;
            for mode in [TripletMode::Horizontal, TripletMode::Full] {
                let fast = count_configs(&grid, mode);
                let oracle = brute_force_count(&grid, mode).unwrap();
                checks.check(
                    fast == oracle,
                    format!("{rows}x{cols} {} mismatch: {fast:?} vs {oracle:?}", mode.as_str()),
                );
            }
        }
    }
    assert_eq!(grids_checked, 300);
    checks.finish();
}

#[test]
fn criterion_3_per_grid_identities() {
    let mut checks = Checks::new("criterion 3 (per-grid identities and enthalpy routes)");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps1 = eps_from_h(1.3).unwrap();

    let mut grids: Vec<Grid> = Vec::new();
    for (rows, cols) in [(4, 4), (6, 8), (8, 6), (16, 16)] {
        for k in 0..25 {
            let p = 0.1 + 0.8 * k as f64 / 24.0;
            grids.push(Grid::random(rows, cols, p, &mut rng).unwrap());
        }
    }
    // include minimized grids from the x1 = 0.35 sweep cells
    for (_, trials) in SWEEP_035.records.iter().take(3) {
        for record in trials.iter().take(3) {
            let f = record.post_perturb.fractions;
            check_identities(&mut checks, &f, eps1, "sweep record");
        }
    }
    for grid in &grids {
        let f = fractions(grid, TripletMode::Horizontal).unwrap();
        check_identities(&mut checks, &f, eps1, "random grid");
    }
    checks.finish();
}

fn check_identities(
    checks: &mut Checks,
    f: &cvm2d::configuration::ConfigFractions,
    eps1: f64,
    origin: &str,
) {
    let id1 = (f.y[0] - (f.z[0] + f.z[1])).abs();
    let id2 = (f.y[2] - (f.z[4] + f.z[5])).abs();
    let id3 = (2.0 * f.y[1] - (f.z[1] + f.z[2] + f.z[3] + f.z[4])).abs();
    checks.check(id1 <= 1e-12, format!("{origin}: y1 = z1+z2 off by {id1}"));
    checks.check(id2 <= 1e-12, format!("{origin}: y3 = z5+z6 off by {id2}"));
    checks.check(id3 <= 1e-12, format!("{origin}: 2y2 = z2+z3+z4+z5 off by {id3}"));
    for form in [EnthalpyForm::Previous2y2, EnthalpyForm::CurrentDelta] {
        let gap = (enthalpy(f, eps1, form) - enthalpy_z_form(f, eps1, form)).abs();
        checks.check(gap <= 1e-12, format!("{origin}: enthalpy {form:?} y/z gap {gap}"));
    }
}

#[test]
fn criterion_4_entropy_anchors() {
    let mut checks = Checks::new("criterion 4 (entropy anchors)");

    let ideal = cvm2d::configuration::ConfigFractions {
        x: [0.5, 0.5],
        y: [0.25, 0.25, 0.25],
        w: [0.25, 0.25, 0.25],
        z: [0.125; 6],
    };
    let s = entropy(&ideal).unwrap();
    checks.check((s - LN_2).abs() <= 1e-12, format!("ideal S = {s}, want ln 2 = {LN_2}"));

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut sum = 0.0;
    for _ in 0..50 {
        let grid = Grid::random(16, 16, 0.5, &mut rng).unwrap();
        sum += entropy(&fractions(&grid, TripletMode::Horizontal).unwrap()).unwrap();
    }
    let mean = sum / 50.0;
    checks.check((mean - LN_2).abs() <= 0.02, format!("ensemble mean S = {mean}"));

    let all_a = fractions(&Grid::uniform(16, 16, CellState::A).unwrap(), TripletMode::Horizontal)
        .unwrap();
    let s_all_a = entropy(&all_a).unwrap();
    checks.check(s_all_a == 0.0, format!("S(all-A) = {s_all_a}, want exactly 0"));

    let alt = fractions(&row_alternating_16x16(), TripletMode::Horizontal).unwrap();
    let s_alt = entropy(&alt).unwrap();
    checks.check(s_alt == 0.0, format!("S(row-alternating) = {s_alt}, want exactly 0"));

    checks.finish();
}

#[test]
fn criterion_5_reference_reproduction_x1_035() {
    let fixture = &*SWEEP_035;
    let mut checks = Checks::new("criterion 5 (reference reproduction, x1 = 0.35, 20 trials)");

    let y2_10 = post_row(fixture, 1.0).y[1];
    checks.check(
        (y2_10 - 0.2275).abs() <= 0.01,
        format!("y2(1.0) = {y2_10:.4}, want 0.2275 +/- 0.01"),
    );
    let delta_10 = post_row(fixture, 1.0).delta;
    checks.check(
        (delta_10 - (-0.090)).abs() <= 0.01,
        format!("delta(1.0) = {delta_10:.4}, want -0.090 +/- 0.01"),
    );
    let y2_08 = post_row(fixture, 0.8).y[1];
    checks.check(
        (y2_08 - 0.301).abs() <= 0.03,
        format!("y2(0.8) = {y2_08:.4}, want 0.301 +/- 0.03 (known-red: converged minimum of the pinned free energy, see README, Known acceptance failures)"),
    );
    let y2_18 = post_row(fixture, 1.8).y[1];
    checks.check(
        (y2_18 - 0.151).abs() <= 0.03,
        format!("y2(1.8) = {y2_18:.4}, want 0.151 +/- 0.03 (known-red: converged minimum of the pinned free energy, see README, Known acceptance failures)"),
    );

    let y2_series: Vec<f64> = fixture
        .rows
        .iter()
        .filter(|r| r.phase == Phase::PostPerturb)
        .map(|r| r.y[1])
        .collect();
    for (i, pair) in y2_series.windows(2).enumerate() {
        checks.check(
            pair[1] <= pair[0] + 0.01,
            format!("y2 not monotone (noise allowance 0.01) at step {i}: {} -> {}", pair[0], pair[1]),
        );
    }
    checks.finish();
}

#[test]
fn criterion_6_equiprobable_agreement() {
    let mut checks = Checks::new("criterion 6 (equiprobable z3 vs analytic)");

    let run_at = |h: f64| {
        let config = RunConfig {
            x1_target: 0.5,
            h_min: h,
            h_max: h,
            h_step: 0.1,
            ..RunConfig::default()
        };
        let rows = run_sweep(&config).unwrap();
        rows.iter().find(|r| r.phase == Phase::PostPerturb).unwrap().z[2]
    };

    for h in [0.9, 1.0, 1.1] {
        let experimental = run_at(h);
        let analytic = match z3_current(h).unwrap() {
            AnalyticValue::Value(v) => v,
            AnalyticValue::Divergent => unreachable!("no pole at {h}"),
        };
        let gap = (experimental - analytic).abs();
        let known_red = if h == 1.0 { "" } else { " (known-red: grid minima track the Lagrange-constrained analytic curve only loosely off h = 1, see README, Known acceptance failures)" };
        checks.check(
            gap <= 0.02,
            format!("z3({h}) = {experimental:.4} vs analytic {analytic:.4}, gap {gap:.4} > 0.02{known_red}"),
        );
    }

    // near the pole only finiteness and the physical band are required
    let z3_pole = run_at(1.554);
    checks.check(
        z3_pole.is_finite() && z3_pole > 0.0 && z3_pole <= 0.125,
        format!("z3(1.554) = {z3_pole}, want finite in (0, 0.125]"),
    );
    checks.finish();
}

#[test]
fn criterion_7_descent_contract() {
    let fixture = &*SWEEP_035;
    let mut checks = Checks::new("criterion 7 (descent contract and reproducibility)");

    // accepted-step free energies strictly decrease on every trial
    for (h, trials) in &fixture.records {
        for (t, record) in trials.iter().enumerate() {
            for (phase, trace) in
                [("pre", &record.pre_trace), ("post", &record.post_trace)]
            {
                let accepted: Vec<f64> = trace
                    .steps
                    .iter()
                    .filter(|s| s.accepted)
                    .map(|s| s.free_energy)
                    .collect();
                for pair in accepted.windows(2) {
                    checks.check(
                        pair[1] < pair[0],
                        format!("h={h} trial {t} {phase}: accepted G not strictly decreasing"),
                    );
                }
            }
        }
    }

    // x1 bit-constant across descend: the recorded x1 equals the exact
    // adjusted count ratio, and a direct descend preserves the A-count
    let n = (fixture.config.rows * fixture.config.cols) as f64;
    let expected_x1 = (fixture.config.x1_target * n).round() / n;
    for (h, trials) in &fixture.records {
        for (t, record) in trials.iter().enumerate() {
            checks.check(
                record.pre_perturb.x1 == expected_x1 && record.post_perturb.x1 == expected_x1,
                format!(
                    "h={h} trial {t}: x1 drifted ({} / {} vs {expected_x1})",
                    record.pre_perturb.x1, record.post_perturb.x1
                ),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = fixture.config.descent_params(1.2);
    let mut grid = Grid::random(16, 16, 0.35, &mut rng).unwrap();
    adjust_x1(&mut grid, 0.35, params.tolerance_for(256), &mut rng).unwrap();
    let a_before = grid.a_count();
    descend(&mut grid, &params, &mut rng).unwrap();
    checks.check(
        grid.a_count() == a_before,
        format!("descend changed A-count {a_before} -> {}", grid.a_count()),
    );

    // byte reproducibility of the whole pipeline from (config, seed)
    let mut csv_a = Vec::new();
    write_sweep_csv(&run_sweep(&fixture.config).unwrap(), &mut csv_a).unwrap();
    let mut csv_b = Vec::new();
    write_sweep_csv(&run_sweep(&fixture.config).unwrap(), &mut csv_b).unwrap();
    checks.check(csv_a == csv_b, "sweep CSV not byte-identical across runs".to_string());

    checks.finish();
}

#[test]
fn criterion_8_stagnation() {
    let fixture = &*SWEEP_035;
    let mut checks = Checks::new("criterion 8 (y2 stagnation between h = 1.4 and 1.8)");
    let y2_14 = post_row(fixture, 1.4).y[1];
    let y2_18 = post_row(fixture, 1.8).y[1];
    let change = (y2_14 - y2_18).abs();
    checks.check(
        change < 0.01,
        format!(
            "y2(1.4) = {y2_14:.4}, y2(1.8) = {y2_18:.4}, change {change:.4} >= 0.01 (known-red: this search keeps a small productive-swap rate at strong coupling instead of stalling, see README, Known acceptance failures)"
        ),
    );
    checks.finish();
}
