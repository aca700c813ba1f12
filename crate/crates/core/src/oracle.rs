//! Brute-force configuration counting from geometric first principles.
//!
//! Mechanized replacement for desk-checking small grids by hand. Cells are
//! placed on the torus at half-column resolution (odd rows shifted right by
//! one half-unit), relations are recognized purely from wrapped displacement
//! images, and slots are enumerated by scanning all cell pairs and triples.
//! No traversal or neighbor-formula code is shared with
//! [`count_configs`](crate::configuration::count_configs).

use crate::configuration::{ConfigCounts, TripletMode};
use crate::error::{CvmError, Result};
use crate::lattice::{CellState, Grid};

/// The oracle is meant for desk-scale verification only.
pub const ORACLE_UNIT_LIMIT: usize = 4096;

/// Number of wrapped displacement images taking `p` to `q` whose
/// half-column offset is `want_dx` in magnitude and row offset `want_dy` in
/// magnitude. Small wrapped grids can realize one relation through two
/// images (e.g. up-two and down-two on four rows), and each image is a
/// distinct slot.
fn image_multiplicity(
    rows: usize,
    cols: usize,
    p: (usize, usize),
    q: (usize, usize),
    want_dx: isize,
    want_dy: isize,
) -> usize {
    let half_cols = 2 * cols as isize;
    let px = 2 * p.1 as isize + (p.0 % 2) as isize;
    let qx = 2 * q.1 as isize + (q.0 % 2) as isize;
    let dx0 = (qx - px).rem_euclid(half_cols);
    let dy0 = (q.0 as isize - p.0 as isize).rem_euclid(rows as isize);

    let dx_images = [dx0, dx0 - half_cols]
        .iter()
        .filter(|&&d| d.abs() == want_dx)
        .count();
    let dy_images = [dy0, dy0 - rows as isize]
        .iter()
        .filter(|&&d| d.abs() == want_dy)
        .count();
    dx_images * dy_images
}

fn is_nearest_neighbor(rows: usize, cols: usize, p: (usize, usize), q: (usize, usize)) -> bool {
    image_multiplicity(rows, cols, p, q, 1, 1) > 0
}

/// `q` sits one full column to the right of `p` in the same row.
fn is_right_neighbor(cols: usize, p: (usize, usize), q: (usize, usize)) -> bool {
    let half_cols = 2 * cols as isize;
    let px = 2 * p.1 as isize + (p.0 % 2) as isize;
    let qx = 2 * q.1 as isize + (q.0 % 2) as isize;
    p.0 == q.0 && (qx - px).rem_euclid(half_cols) == 2
}

/// `q` sits two rows below `p` in the same column. On four-row grids this
/// holds in both directions of a pair; each direction owns its own slots.
fn is_down_two(rows: usize, p: (usize, usize), q: (usize, usize)) -> bool {
    p.1 == q.1 && (q.0 as isize - p.0 as isize).rem_euclid(rows as isize) == 2
}

fn pair_class(a: CellState, b: CellState) -> usize {
    if a == b {
        if a == CellState::A {
            0
        } else {
            2
        }
    } else {
        1
    }
}

fn triplet_class(states: (CellState, CellState, CellState)) -> usize {
    use CellState::{A, B};
    match states {
        (A, A, A) => 0,
        (A, A, B) | (B, A, A) => 1,
        (A, B, A) => 2,
        (B, A, B) => 3,
        (A, B, B) | (B, B, A) => 4,
        (B, B, B) => 5,
    }
}

/// Independently re-derives the full slot tally of a grid by scanning every
/// ordered cell pair (and every candidate apex for triplets).
pub fn brute_force_count(grid: &Grid, mode: TripletMode) -> Result<ConfigCounts> {
    let n = grid.n_units();
    if n > ORACLE_UNIT_LIMIT {
        return Err(CvmError::OracleSizeExceeded { n, limit: ORACLE_UNIT_LIMIT });
    }
    let rows = grid.rows();
    let cols = grid.cols();
    let positions: Vec<(usize, usize)> =
        (0..n).map(|i| (i / cols, i % cols)).collect();

    let mut cx = [0u64; 2];
    for &(r, c) in &positions {
        match grid.state(r, c) {
            CellState::A => cx[0] += 1,
            CellState::B => cx[1] += 1,
        }
    }

    // every ordered pair; each undirected slot is found from both ends
    let mut cy_ordered = [0u64; 3];
    let mut cw_ordered = [0u64; 3];
    for &p in &positions {
        for &q in &positions {
            let class = pair_class(grid.state(p.0, p.1), grid.state(q.0, q.1));
            let nn = image_multiplicity(rows, cols, p, q, 1, 1);
            cy_ordered[class] += nn as u64;
            let w_horizontal = image_multiplicity(rows, cols, p, q, 2, 0);
            let w_vertical = image_multiplicity(rows, cols, p, q, 0, 2);
            cw_ordered[class] += (w_horizontal + w_vertical) as u64;
        }
    }
    let cy = [cy_ordered[0] / 2, cy_ordered[1] / 2, cy_ordered[2] / 2];
    let cw = [cw_ordered[0] / 2, cw_ordered[1] / 2, cw_ordered[2] / 2];

    let mut cz = [0u64; 6];
    // horizontal zigzags: a same-row adjacent pair plus any cell adjacent
    // to both endpoints
    for &p in &positions {
        for &q in &positions {
            if !is_right_neighbor(cols, p, q) {
                continue;
            }
            for &a in &positions {
                if is_nearest_neighbor(rows, cols, p, a) && is_nearest_neighbor(rows, cols, a, q) {
                    let states =
                        (grid.state(p.0, p.1), grid.state(a.0, a.1), grid.state(q.0, q.1));
                    cz[triplet_class(states)] += 1;
                }
            }
        }
    }
    if mode == TripletMode::Full {
        // vertical zigzags: a same-column two-apart pair plus the shared
        // contacts in the row crossed on the way down
        for &p in &positions {
            for &q in &positions {
                if !is_down_two(rows, p, q) {
                    continue;
                }
                let between = (p.0 + 1) % rows;
                for &a in &positions {
                    if a.0 == between
                        && is_nearest_neighbor(rows, cols, p, a)
                        && is_nearest_neighbor(rows, cols, a, q)
                    {
                        let states =
                            (grid.state(p.0, p.1), grid.state(a.0, a.1), grid.state(q.0, q.1));
                        cz[triplet_class(states)] += 1;
                    }
                }
            }
        }
    }

    let pair_total = cy.iter().sum();
    let triplet_total = cz.iter().sum();
    Ok(ConfigCounts {
        n_units: n,
        mode,
        cx,
        cy,
        cw,
        cz,
        pair_total,
        triplet_total,
    })
}
