//! Property tests over randomized grids: oracle equivalence, per-grid
//! identities, round trips, and descent invariants.

use proptest::prelude::*;

use cvm2d::configuration::{count_configs, fractions, TripletMode};
use cvm2d::lattice::{CellState, Grid, GridGeometry};
use cvm2d::minimizer::{adjust_x1, descend, DescentParams};
use cvm2d::oracle::brute_force_count;
use cvm2d::thermodynamics::{enthalpy, enthalpy_z_form, entropy, eps_from_h, EnthalpyForm};

fn arb_grid() -> impl Strategy<Value = Grid> {
    (prop_oneof![Just(4usize), Just(6), Just(8)], 4usize..9)
        .prop_flat_map(|(rows, cols)| {
            prop::collection::vec(prop::bool::ANY, rows * cols)
                .prop_map(move |bits| {
                    let cells = bits
                        .into_iter()
                        .map(|b| if b { CellState::A } else { CellState::B })
                        .collect();
                    Grid::from_states(rows, cols, cells).unwrap()
                })
        })
}

fn arb_mode() -> impl Strategy<Value = TripletMode> {
    prop_oneof![Just(TripletMode::Horizontal), Just(TripletMode::Full)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counting_matches_oracle(grid in arb_grid(), mode in arb_mode()) {
        prop_assert_eq!(count_configs(&grid, mode), brute_force_count(&grid, mode).unwrap());
    }

    #[test]
    fn fractions_are_normalized_and_in_range(grid in arb_grid(), mode in arb_mode()) {
        let f = fractions(&grid, mode).unwrap();
        prop_assert!(f.all_in_unit_interval());
        for sum in f.normalization_sums() {
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn per_grid_identities(grid in arb_grid()) {
        let f = fractions(&grid, TripletMode::Horizontal).unwrap();
        prop_assert!((f.y[0] - (f.z[0] + f.z[1])).abs() <= 1e-12);
        prop_assert!((f.y[2] - (f.z[4] + f.z[5])).abs() <= 1e-12);
        prop_assert!((2.0 * f.y[1] - (f.z[1] + f.z[2] + f.z[3] + f.z[4])).abs() <= 1e-12);

        let eps1 = eps_from_h(1.4).unwrap();
        for form in [EnthalpyForm::Previous2y2, EnthalpyForm::CurrentDelta] {
            let gap = (enthalpy(&f, eps1, form) - enthalpy_z_form(&f, eps1, form)).abs();
            prop_assert!(gap <= 1e-12);
        }
    }

    #[test]
    fn save_load_round_trip(grid in arb_grid()) {
        let mut buf = Vec::new();
        grid.save(&mut buf).unwrap();
        prop_assert_eq!(Grid::load(buf.as_slice()).unwrap(), grid);
    }

    #[test]
    fn flip_is_involutive(grid in arb_grid(), r_bits in 0usize..64, c_bits in 0usize..64) {
        let mut g = grid.clone();
        let r = r_bits % g.rows();
        let c = c_bits % g.cols();
        g.flip_unit(r, c).unwrap();
        prop_assert_ne!(&g, &grid);
        g.flip_unit(r, c).unwrap();
        prop_assert_eq!(g, grid);
    }

    #[test]
    fn entropy_is_relabel_invariant(grid in arb_grid(), mode in arb_mode()) {
        let mirrored = Grid::from_states(
            grid.rows(),
            grid.cols(),
            grid.cells().iter().map(|s| s.flipped()).collect(),
        )
        .unwrap();
        let s = entropy(&fractions(&grid, mode).unwrap()).unwrap();
        let sm = entropy(&fractions(&mirrored, mode).unwrap()).unwrap();
        prop_assert!((s - sm).abs() <= 1e-12);
    }

    #[test]
    fn adjacency_is_symmetric(rows in prop_oneof![Just(4usize), Just(6), Just(8)], cols in 4usize..10) {
        let geom = GridGeometry::new(rows, cols).unwrap();
        for r in 0..rows {
            for c in 0..cols {
                for (nr, nc) in geom.nearest_neighbors(r, c) {
                    prop_assert!(
                        geom.nearest_neighbors(nr, nc).contains(&(r, c)),
                        "({r},{c}) lists ({nr},{nc}) but not vice versa"
                    );
                }
                for (nr, nc) in geom.next_nearest_neighbors(r, c) {
                    prop_assert!(geom.next_nearest_neighbors(nr, nc).contains(&(r, c)));
                }
            }
        }
    }

    #[test]
    fn incremental_counts_track_full_recount(
        grid in arb_grid(),
        mode in arb_mode(),
        flips in prop::collection::vec((0usize..64, 0usize..64), 1..30),
    ) {
        let mut g = grid;
        let mut counts = count_configs(&g, mode);
        for (rb, cb) in flips {
            let r = rb % g.rows();
            let c = cb % g.cols();
            counts.apply_flip(&mut g, r, c);
        }
        prop_assert_eq!(counts, count_configs(&g, mode));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn descent_invariants(seed in 0u64..1000, h_step in 0usize..5) {
        use rand::SeedableRng;
        let h = [0.9, 1.0, 1.1, 1.3, 1.6][h_step];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut grid = Grid::random(8, 8, 0.4, &mut rng).unwrap();
        let params = DescentParams {
            max_swap_attempts: 400,
            stall_limit: 150,
            ..DescentParams::new(h, 0.4)
        };
        adjust_x1(&mut grid, 0.4, params.tolerance_for(64), &mut rng).unwrap();
        let a_before = grid.a_count();

        let trace = descend(&mut grid, &params, &mut rng).unwrap();
        prop_assert_eq!(grid.a_count(), a_before);

        let accepted: Vec<f64> = trace
            .steps
            .iter()
            .filter(|s| s.accepted)
            .map(|s| s.free_energy)
            .collect();
        for pair in accepted.windows(2) {
            prop_assert!(pair[1] < pair[0]);
        }
        // y2 stays in the physical band
        prop_assert!(trace.fractions.y[1] > 0.0 && trace.fractions.y[1] <= 0.5);
    }

    #[test]
    fn analytic_forms_are_substitution_related(h_milli in 500u32..2200) {
        let h = h_milli as f64 / 1000.0;
        let current = cvm2d::analytic::z3_current(h).unwrap();
        let previous = cvm2d::analytic::z3_previous(h * h).unwrap();
        match (current, previous) {
            (cvm2d::analytic::AnalyticValue::Value(a), cvm2d::analytic::AnalyticValue::Value(b)) => {
                prop_assert!((a - b).abs() <= 1e-12)
            }
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}
