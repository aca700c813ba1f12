//! Configuration-variable accounting: raw slot tallies and their
//! degeneracy-adjusted fractions.
//!
//! Pattern classes follow the fixed map z1=AAA, z2={AAB, BAA}, z3=ABA,
//! z4=BAB, z5={ABB, BBA}, z6=BBB, with pair degeneracies beta = (1, 2, 1)
//! and triplet degeneracies gamma = (1, 2, 1, 1, 2, 1). Mixed classes store
//! the undirected count; degeneracy is applied at fraction time.

use crate::error::{CvmError, Result};
use crate::lattice::{CellState, Grid, TripletSlot};

/// Which triplet slots are tallied. `Horizontal` counts only the row-pair
/// zigzags (2N slots); `Full` adds the column-pair zigzags (4N slots).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TripletMode {
    #[default]
    Horizontal,
    Full,
}

impl TripletMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TripletMode::Horizontal => "horizontal",
            TripletMode::Full => "full",
        }
    }
}

/// Raw integer tallies of unit / pair / next-nearest / triplet patterns over
/// every wrapped slot of a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigCounts {
    pub n_units: usize,
    pub mode: TripletMode,
    /// Units in A, B.
    pub cx: [u64; 2],
    /// Nearest-neighbor pairs: AA, mixed, BB.
    pub cy: [u64; 3],
    /// Next-nearest pairs: AA, mixed, BB.
    pub cw: [u64; 3],
    /// Triplets z1..z6 (z2 and z5 hold both orderings).
    pub cz: [u64; 6],
    /// Pair slots actually enumerated (2N for each of y and w).
    pub pair_total: u64,
    /// Triplet slots actually enumerated (2N horizontal, 4N full).
    pub triplet_total: u64,
}

/// Degeneracy-adjusted fractional configuration variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigFractions {
    pub x: [f64; 2],
    pub y: [f64; 3],
    pub w: [f64; 3],
    pub z: [f64; 6],
}

pub const PAIR_DEGENERACY: [f64; 3] = [1.0, 2.0, 1.0];
pub const TRIPLET_DEGENERACY: [f64; 6] = [1.0, 2.0, 1.0, 1.0, 2.0, 1.0];

fn pair_class(a: CellState, b: CellState) -> usize {
    match (a, b) {
        (CellState::A, CellState::A) => 0,
        (CellState::B, CellState::B) => 2,
        _ => 1,
    }
}

fn triplet_class(first: CellState, apex: CellState, second: CellState) -> usize {
    use CellState::{A, B};
    match (first, apex, second) {
        (A, A, A) => 0,
        (A, A, B) | (B, A, A) => 1,
        (A, B, A) => 2,
        (B, A, B) => 3,
        (A, B, B) | (B, B, A) => 4,
        (B, B, B) => 5,
    }
}

fn slot_states(grid: &Grid, t: &TripletSlot) -> (CellState, CellState, CellState) {
    (
        grid.state(t.first.0, t.first.1),
        grid.state(t.apex.0, t.apex.1),
        grid.state(t.second.0, t.second.1),
    )
}

/// Tallies every configuration slot of the grid exactly once. Pure: same
/// grid in, same counts out.
pub fn count_configs(grid: &Grid, mode: TripletMode) -> ConfigCounts {
    let geom = grid.geometry();
    let n = geom.n_units();
    let mut counts = ConfigCounts {
        n_units: n,
        mode,
        cx: [0; 2],
        cy: [0; 3],
        cw: [0; 3],
        cz: [0; 6],
        pair_total: 0,
        triplet_total: 0,
    };

    for r in 0..geom.rows() {
        for c in 0..geom.cols() {
            let s = grid.state(r, c);
            counts.cx[if s == CellState::A { 0 } else { 1 }] += 1;

            // each cell owns its two downward diagonal contacts
            for (nr, nc) in geom.contacts_below(r, c) {
                counts.cy[pair_class(s, grid.state(nr, nc))] += 1;
                counts.pair_total += 1;
            }

            // each cell owns its rightward and down-two next-nearest slots
            let right = (r, (c + 1) % geom.cols());
            let down2 = ((r + 2) % geom.rows(), c);
            counts.cw[pair_class(s, grid.state(right.0, right.1))] += 1;
            counts.cw[pair_class(s, grid.state(down2.0, down2.1))] += 1;

            for t in geom.horizontal_triplets_at(r, c) {
                let (a, b, d) = slot_states(grid, &t);
                counts.cz[triplet_class(a, b, d)] += 1;
                counts.triplet_total += 1;
            }
            if mode == TripletMode::Full {
                for t in geom.vertical_triplets_at(r, c) {
                    let (a, b, d) = slot_states(grid, &t);
                    counts.cz[triplet_class(a, b, d)] += 1;
                    counts.triplet_total += 1;
                }
            }
        }
    }
    counts
}

impl ConfigCounts {
    /// Incrementally retargets the tallies for a single-cell flip: removes
    /// the contributions of every slot containing `(r, c)`, flips the cell
    /// on the grid, and re-adds them. Exactly equivalent to a full recount
    /// of the flipped grid.
    pub fn apply_flip(&mut self, grid: &mut Grid, r: usize, c: usize) {
        self.update_cell_slots(grid, r, c, false);
        let old = grid.state(r, c);
        grid.flip_unit(r, c).expect("flip target in range");
        self.cx[if old == CellState::A { 0 } else { 1 }] -= 1;
        self.cx[if old == CellState::A { 1 } else { 0 }] += 1;
        self.update_cell_slots(grid, r, c, true);
    }

    /// Adds (`add = true`) or removes the pair and triplet slots that
    /// contain cell `(r, c)`. Slot ownership mirrors `count_configs`: each
    /// slot is visited through its unique owning cell, so shared-pair slots
    /// on small wrapped grids keep their multiplicity.
    fn update_cell_slots(&mut self, grid: &Grid, r: usize, c: usize, add: bool) {
        let geom = grid.geometry();
        let s = grid.state(r, c);
        let rows = geom.rows();
        let cols = geom.cols();
        let bump_y = |class: usize, counts: &mut [u64; 3]| {
            if add {
                counts[class] += 1;
            } else {
                counts[class] -= 1;
            }
        };

        // nearest-neighbor slots: owned (2 below) + owning cells above (2)
        for (nr, nc) in geom.contacts_below(r, c) {
            let class = pair_class(s, grid.state(nr, nc));
            bump_y(class, &mut self.cy);
        }
        for (nr, nc) in geom.contacts_above(r, c) {
            let class = pair_class(grid.state(nr, nc), s);
            bump_y(class, &mut self.cy);
        }

        // next-nearest slots: owned (right, down-two) + owners (left, up-two)
        let left = (r, (c + cols - 1) % cols);
        let right = (r, (c + 1) % cols);
        let up2 = ((r + rows - 2) % rows, c);
        let down2 = ((r + 2) % rows, c);
        bump_y(pair_class(s, grid.state(right.0, right.1)), &mut self.cw);
        bump_y(pair_class(grid.state(left.0, left.1), s), &mut self.cw);
        bump_y(pair_class(s, grid.state(down2.0, down2.1)), &mut self.cw);
        bump_y(pair_class(grid.state(up2.0, up2.1), s), &mut self.cw);

        let bump_z = |slot: &TripletSlot, cz: &mut [u64; 6]| {
            let (a, b, d) = slot_states(grid, slot);
            let class = triplet_class(a, b, d);
            if add {
                cz[class] += 1;
            } else {
                cz[class] -= 1;
            }
        };

        // horizontal triplets containing (r, c): as owner, as right
        // endpoint of the left neighbor's slots, and as apex of one slot
        // owned in each adjacent row.
        for t in geom.horizontal_triplets_at(r, c) {
            bump_z(&t, &mut self.cz);
        }
        for t in geom.horizontal_triplets_at(left.0, left.1) {
            bump_z(&t, &mut self.cz);
        }
        let above = (r + rows - 1) % rows;
        let below = (r + 1) % rows;
        let apex_owner_col = |owner_row: usize| {
            if owner_row.is_multiple_of(2) {
                c
            } else {
                (c + cols - 1) % cols
            }
        };
        // owner in the row above whose apex_below is (r, c)
        let oc = apex_owner_col(above);
        bump_z(
            &TripletSlot {
                first: (above, oc),
                apex: (r, c),
                second: (above, (oc + 1) % cols),
            },
            &mut self.cz,
        );
        // owner in the row below whose apex_above is (r, c)
        let oc = apex_owner_col(below);
        bump_z(
            &TripletSlot {
                first: (below, oc),
                apex: (r, c),
                second: (below, (oc + 1) % cols),
            },
            &mut self.cz,
        );

        if self.mode == TripletMode::Full {
            // vertical triplets: as top owner, as bottom of the up-two
            // owner, and as apex of slots owned by its two contacts above.
            for t in geom.vertical_triplets_at(r, c) {
                bump_z(&t, &mut self.cz);
            }
            for t in geom.vertical_triplets_at(up2.0, up2.1) {
                bump_z(&t, &mut self.cz);
            }
            for (or, oc) in geom.contacts_above(r, c) {
                bump_z(
                    &TripletSlot {
                        first: (or, oc),
                        apex: (r, c),
                        second: ((or + 2) % rows, oc),
                    },
                    &mut self.cz,
                );
            }
        }
    }

    /// Converts raw tallies to degeneracy-adjusted fractions.
    pub fn to_fractions(&self) -> Result<ConfigFractions> {
        if self.n_units == 0 || self.pair_total == 0 || self.triplet_total == 0 {
            return Err(CvmError::InvalidArgument(
                "cannot form fractions from zero slot totals".into(),
            ));
        }
        let n = self.n_units as f64;
        let pairs = self.pair_total as f64;
        let triplets = self.triplet_total as f64;
        Ok(ConfigFractions {
            x: [self.cx[0] as f64 / n, self.cx[1] as f64 / n],
            y: [
                self.cy[0] as f64 / pairs,
                self.cy[1] as f64 / (2.0 * pairs),
                self.cy[2] as f64 / pairs,
            ],
            w: [
                self.cw[0] as f64 / pairs,
                self.cw[1] as f64 / (2.0 * pairs),
                self.cw[2] as f64 / pairs,
            ],
            z: [
                self.cz[0] as f64 / triplets,
                self.cz[1] as f64 / (2.0 * triplets),
                self.cz[2] as f64 / triplets,
                self.cz[3] as f64 / triplets,
                self.cz[4] as f64 / (2.0 * triplets),
                self.cz[5] as f64 / triplets,
            ],
        })
    }
}

impl ConfigFractions {
    /// The interaction term 2*y2 - y1 - y3: positive for alternation-rich
    /// grids, negative for clustered ones.
    pub fn delta(&self) -> f64 {
        2.0 * self.y[1] - self.y[0] - self.y[2]
    }

    /// Normalization sums that must each equal 1.
    pub fn normalization_sums(&self) -> [f64; 4] {
        let sx = self.x.iter().sum();
        let sy = self.y.iter().zip(PAIR_DEGENERACY).map(|(v, d)| v * d).sum();
        let sw = self.w.iter().zip(PAIR_DEGENERACY).map(|(v, d)| v * d).sum();
        let sz = self.z.iter().zip(TRIPLET_DEGENERACY).map(|(v, d)| v * d).sum();
        [sx, sy, sw, sz]
    }

    pub fn all_in_unit_interval(&self) -> bool {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.w)
            .chain(&self.z)
            .all(|v| (0.0..=1.0).contains(v))
    }
}

/// Convenience: count and convert in one step.
pub fn fractions(grid: &Grid, mode: TripletMode) -> Result<ConfigFractions> {
    count_configs(grid, mode).to_fractions()
}
