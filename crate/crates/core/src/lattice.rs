//! Wrapped staggered 2-D grid of bistate units.
//!
//! Odd-index rows sit half a cell to the right of even-index rows, and every
//! lookup wraps: columns mod `cols`, rows mod `rows`. Rows must be even so the
//! vertical wrap preserves the stagger convention. Nearest neighbors are the
//! four diagonal contacts in the adjacent rows; next-nearest neighbors are the
//! two same-row and two same-column-two-apart contacts; triplets are the
//! zigzag paths over a same-row pair (horizontal) or a same-column pair
//! (vertical), one apex per adjacent row.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{CvmError, Result};

/// State of one unit. `A` is the active ("black") state, encoded `'1'` in
/// grid files; `B` is inactive ("white"), encoded `'0'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    A,
    B,
}

impl CellState {
    pub fn flipped(self) -> Self {
        match self {
            CellState::A => CellState::B,
            CellState::B => CellState::A,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            CellState::A => '1',
            CellState::B => '0',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '1' => Some(CellState::A),
            '0' => Some(CellState::B),
            _ => None,
        }
    }
}

/// Pure adjacency rules for a wrapped staggered lattice of the given shape.
///
/// Holds no unit states; every method is determined by `(rows, cols)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridGeometry {
    rows: usize,
    cols: usize,
}

/// A zigzag triplet slot: two endpoints bridged by one shared diagonal
/// contact (the apex). Patterns are read in `(first, apex, second)` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripletSlot {
    pub first: (usize, usize),
    pub apex: (usize, usize),
    pub second: (usize, usize),
}

impl GridGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 4 || cols < 4 {
            return Err(CvmError::InvalidGeometry(format!(
                "grid must be at least 4x4, got {rows}x{cols}"
            )));
        }
        if !rows.is_multiple_of(2) {
            return Err(CvmError::InvalidGeometry(format!(
                "row count must be even to wrap the staggered lattice, got {rows}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_units(&self) -> usize {
        self.rows * self.cols
    }

    fn wrap_row(&self, r: isize) -> usize {
        r.rem_euclid(self.rows as isize) as usize
    }

    fn wrap_col(&self, c: isize) -> usize {
        c.rem_euclid(self.cols as isize) as usize
    }

    /// Columns of the two diagonal contacts of `(r, c)` in either adjacent
    /// row. Even rows touch columns `c-1, c`; odd (right-shifted) rows touch
    /// `c, c+1`.
    fn contact_cols(&self, r: usize, c: usize) -> [usize; 2] {
        let c = c as isize;
        if r.is_multiple_of(2) {
            [self.wrap_col(c - 1), self.wrap_col(c)]
        } else {
            [self.wrap_col(c), self.wrap_col(c + 1)]
        }
    }

    /// The two nearest-neighbor contacts of `(r, c)` in the row below.
    pub fn contacts_below(&self, r: usize, c: usize) -> [(usize, usize); 2] {
        let rb = self.wrap_row(r as isize + 1);
        let [c0, c1] = self.contact_cols(r, c);
        [(rb, c0), (rb, c1)]
    }

    /// The two nearest-neighbor contacts of `(r, c)` in the row above.
    pub fn contacts_above(&self, r: usize, c: usize) -> [(usize, usize); 2] {
        let ra = self.wrap_row(r as isize - 1);
        let [c0, c1] = self.contact_cols(r, c);
        [(ra, c0), (ra, c1)]
    }

    /// All four diagonal nearest neighbors of `(r, c)`.
    pub fn nearest_neighbors(&self, r: usize, c: usize) -> [(usize, usize); 4] {
        let [b0, b1] = self.contacts_below(r, c);
        let [a0, a1] = self.contacts_above(r, c);
        [b0, b1, a0, a1]
    }

    /// All four next-nearest neighbors: same-row left/right plus
    /// same-column two rows up/down.
    pub fn next_nearest_neighbors(&self, r: usize, c: usize) -> [(usize, usize); 4] {
        let (ri, ci) = (r as isize, c as isize);
        [
            (r, self.wrap_col(ci + 1)),
            (r, self.wrap_col(ci - 1)),
            (self.wrap_row(ri + 2), c),
            (self.wrap_row(ri - 2), c),
        ]
    }

    /// Shared contact of the same-row pair `(r, c), (r, c+1)` in the row
    /// below.
    pub fn apex_below(&self, r: usize, c: usize) -> (usize, usize) {
        let rb = self.wrap_row(r as isize + 1);
        let ac = if r.is_multiple_of(2) { c } else { self.wrap_col(c as isize + 1) };
        (rb, ac)
    }

    /// Shared contact of the same-row pair `(r, c), (r, c+1)` in the row
    /// above.
    pub fn apex_above(&self, r: usize, c: usize) -> (usize, usize) {
        let ra = self.wrap_row(r as isize - 1);
        let ac = if r.is_multiple_of(2) { c } else { self.wrap_col(c as isize + 1) };
        (ra, ac)
    }

    /// The two horizontal zigzag triplets whose endpoints are
    /// `(r, c), (r, c+1)`: one apex in the row above, one in the row below.
    /// Each cell owns two slots, giving `2N` horizontal triplets in total.
    pub fn horizontal_triplets_at(&self, r: usize, c: usize) -> [TripletSlot; 2] {
        let first = (r, c);
        let second = (r, self.wrap_col(c as isize + 1));
        [
            TripletSlot { first, apex: self.apex_below(r, c), second },
            TripletSlot { first, apex: self.apex_above(r, c), second },
        ]
    }

    /// The two vertical zigzag triplets whose endpoints are
    /// `(r, c), (r+2, c)`: the shared contacts in row `r+1` serve as apexes.
    /// Each cell owns two slots, giving `2N` vertical triplets in total.
    pub fn vertical_triplets_at(&self, r: usize, c: usize) -> [TripletSlot; 2] {
        let first = (r, c);
        let second = (self.wrap_row(r as isize + 2), c);
        let [a0, a1] = self.contacts_below(r, c);
        [
            TripletSlot { first, apex: a0, second },
            TripletSlot { first, apex: a1, second },
        ]
    }
}

/// A wrapped staggered grid of bistate units, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    geometry: GridGeometry,
    cells: Vec<CellState>,
}

impl Grid {
    /// Builds a grid from an explicit row-major state sequence.
    pub fn from_states(rows: usize, cols: usize, states: Vec<CellState>) -> Result<Self> {
        let geometry = GridGeometry::new(rows, cols)?;
        if states.len() != geometry.n_units() {
            return Err(CvmError::InvalidGeometry(format!(
                "expected {} states for a {rows}x{cols} grid, got {}",
                geometry.n_units(),
                states.len()
            )));
        }
        Ok(Self { geometry, cells: states })
    }

    /// Builds a grid with every cell in the same state.
    pub fn uniform(rows: usize, cols: usize, state: CellState) -> Result<Self> {
        let geometry = GridGeometry::new(rows, cols)?;
        Ok(Self { geometry, cells: vec![state; geometry.n_units()] })
    }

    /// Each cell is independently `A` with probability `p_a`; fully
    /// determined by the rng stream, the dimensions, and `p_a`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, p_a: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_a) {
            return Err(CvmError::InvalidArgument(format!(
                "p_a must lie in [0, 1], got {p_a}"
            )));
        }
        let geometry = GridGeometry::new(rows, cols)?;
        let cells = (0..geometry.n_units())
            .map(|_| if rng.random_bool(p_a) { CellState::A } else { CellState::B })
            .collect();
        Ok(Self { geometry, cells })
    }

    pub fn geometry(&self) -> GridGeometry {
        self.geometry
    }

    pub fn rows(&self) -> usize {
        self.geometry.rows
    }

    pub fn cols(&self) -> usize {
        self.geometry.cols
    }

    pub fn n_units(&self) -> usize {
        self.geometry.n_units()
    }

    pub fn index(&self, r: usize, c: usize) -> usize {
        r * self.geometry.cols + c
    }

    pub fn state(&self, r: usize, c: usize) -> CellState {
        self.cells[self.index(r, c)]
    }

    pub fn state_at(&self, idx: usize) -> CellState {
        self.cells[idx]
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    fn check_range(&self, r: usize, c: usize) -> Result<()> {
        if r >= self.rows() || c >= self.cols() {
            return Err(CvmError::OutOfRange(r, c, self.rows(), self.cols()));
        }
        Ok(())
    }

    /// Toggles exactly one cell A <-> B.
    pub fn flip_unit(&mut self, r: usize, c: usize) -> Result<()> {
        self.check_range(r, c)?;
        let idx = self.index(r, c);
        self.cells[idx] = self.cells[idx].flipped();
        Ok(())
    }

    fn flip_index(&mut self, idx: usize) {
        self.cells[idx] = self.cells[idx].flipped();
    }

    /// Exchanges an A-unit at `pos_a` with a B-unit at `pos_b`, preserving
    /// the total A-count.
    pub fn swap_pair(&mut self, pos_a: (usize, usize), pos_b: (usize, usize)) -> Result<()> {
        self.check_range(pos_a.0, pos_a.1)?;
        self.check_range(pos_b.0, pos_b.1)?;
        if self.state(pos_a.0, pos_a.1) != CellState::A || self.state(pos_b.0, pos_b.1) != CellState::B
        {
            return Err(CvmError::InvalidSwap(pos_a.0, pos_a.1, pos_b.0, pos_b.1));
        }
        let ia = self.index(pos_a.0, pos_a.1);
        let ib = self.index(pos_b.0, pos_b.1);
        self.cells[ia] = CellState::B;
        self.cells[ib] = CellState::A;
        Ok(())
    }

    pub fn a_count(&self) -> usize {
        self.cells.iter().filter(|&&s| s == CellState::A).count()
    }

    /// Fraction of units in state A.
    pub fn x1(&self) -> f64 {
        self.a_count() as f64 / self.n_units() as f64
    }

    /// Flat indices of all cells currently in `state`.
    pub fn indices_in_state(&self, state: CellState) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == state)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn position(&self, idx: usize) -> (usize, usize) {
        (idx / self.cols(), idx % self.cols())
    }

    pub(crate) fn flip_flat(&mut self, idx: usize) {
        self.flip_index(idx);
    }

    /// Reads a grid from the text format: optional `#` comment lines, a
    /// `rows cols` header, then `rows` lines of exactly `cols` characters
    /// from `{0, 1}`.
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();

        let (header_line_no, header) = loop {
            match lines.next() {
                Some((i, line)) => {
                    let line = line?;
                    if line.starts_with('#') {
                        continue;
                    }
                    break (i + 1, line);
                }
                None => {
                    return Err(CvmError::Parse { line: 0, msg: "missing header line".into() })
                }
            }
        };

        let mut parts = header.split(' ');
        let rows: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CvmError::Parse {
                line: header_line_no,
                msg: format!("expected `rows cols` header, got {header:?}"),
            })?;
        let cols: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CvmError::Parse {
                line: header_line_no,
                msg: format!("expected `rows cols` header, got {header:?}"),
            })?;
        if parts.next().is_some() {
            return Err(CvmError::Parse {
                line: header_line_no,
                msg: format!("trailing tokens in header {header:?}"),
            });
        }

        let mut cells = Vec::with_capacity(rows * cols);
        for row in 0..rows {
            let (line_no, line) = lines.next().ok_or(CvmError::Parse {
                line: header_line_no + row,
                msg: format!("expected {rows} grid rows, file ended after {row}"),
            })?;
            let line = line?;
            if line.chars().count() != cols {
                return Err(CvmError::Parse {
                    line: line_no + 1,
                    msg: format!("ragged row: expected {cols} characters, got {}", line.len()),
                });
            }
            for ch in line.chars() {
                let state = CellState::from_char(ch).ok_or(CvmError::Parse {
                    line: line_no + 1,
                    msg: format!("illegal character {ch:?}, expected '0' or '1'"),
                })?;
                cells.push(state);
            }
        }

        for (line_no, line) in lines {
            let line = line?;
            if !line.is_empty() && !line.starts_with('#') {
                return Err(CvmError::Parse {
                    line: line_no + 1,
                    msg: format!("trailing content after {rows} grid rows: {line:?}"),
                });
            }
        }

        Grid::from_states(rows, cols, cells).map_err(|e| CvmError::Parse {
            line: header_line_no,
            msg: e.to_string(),
        })
    }

    /// Writes the grid in the same format `load` reads; LF newlines.
    pub fn save<W: Write>(&self, writer: &mut W) -> Result<()> {
        writeln!(writer, "{} {}", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                write!(writer, "{}", self.state(r, c).to_char())?;
            }
            writer.write_all(b"\n")?;
        }
        Ok(())
    }
}
