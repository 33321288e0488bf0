//! Hitori grids, cell references, and shading states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported row or column count. Two-digit variable names depend on it.
pub const MAX_DIM: usize = 99;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PuzzleError {
    #[error("puzzle text is empty")]
    Empty,
    #[error("line {line}: expected {expected} symbols, found {found}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bad token {token:?} (symbols are integers >= 1)")]
    BadToken { line: usize, token: String },
    #[error("grid is {rows}x{cols}; at most {MAX_DIM}x{MAX_DIM} is supported")]
    TooLarge { rows: usize, cols: usize },
    #[error("state is {found_rows}x{found_cols} but grid is {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("bad cell name {0:?}")]
    BadCellName(String),
}

/// A zero-based cell position. Displayed as `r{row+1}c{col+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub row: usize,
    pub col: usize,
}

impl CellRef {
    pub const fn new(row: usize, col: usize) -> Self {
        CellRef { row, col }
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}c{}", self.row + 1, self.col + 1)
    }
}

impl FromStr for CellRef {
    type Err = PuzzleError;

    /// Parses the external `r3c4` form (1-based).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PuzzleError::BadCellName(s.to_string());
        let rest = s.strip_prefix('r').ok_or_else(bad)?;
        let (r, c) = rest.split_once('c').ok_or_else(bad)?;
        let parse = |t: &str| -> Result<usize, PuzzleError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<usize>().map_err(|_| bad())
        };
        let (r, c) = (parse(r)?, parse(c)?);
        if r == 0 || c == 0 {
            return Err(bad());
        }
        Ok(CellRef::new(r - 1, c - 1))
    }
}

/// An m x n matrix of positive symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    symbols: Vec<u32>,
}

impl Grid {
    pub fn new(symbols: Vec<Vec<u32>>) -> Result<Self, PuzzleError> {
        let rows = symbols.len();
        if rows == 0 {
            return Err(PuzzleError::Empty);
        }
        let cols = symbols[0].len();
        if cols == 0 {
            return Err(PuzzleError::Empty);
        }
        for (i, row) in symbols.iter().enumerate() {
            if row.len() != cols {
                return Err(PuzzleError::RaggedRows {
                    line: i + 1,
                    expected: cols,
                    found: row.len(),
                });
            }
            if let Some(&bad) = row.iter().find(|&&v| v == 0) {
                return Err(PuzzleError::BadToken {
                    line: i + 1,
                    token: bad.to_string(),
                });
            }
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(PuzzleError::TooLarge { rows, cols });
        }
        Ok(Grid {
            rows,
            cols,
            symbols: symbols.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, cell: CellRef) -> u32 {
        self.symbols[self.index(cell)]
    }

    pub fn contains(&self, cell: CellRef) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    /// Row-major index of a cell.
    pub fn index(&self, cell: CellRef) -> usize {
        debug_assert!(self.contains(cell));
        cell.row * self.cols + cell.col
    }

    pub fn cell_at(&self, index: usize) -> CellRef {
        CellRef::new(index / self.cols, index % self.cols)
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        (0..self.len()).map(|i| self.cell_at(i))
    }

    /// Orthogonal neighbours in the order up, left, right, down (row-major).
    pub fn neighbors(&self, cell: CellRef) -> impl Iterator<Item = CellRef> {
        let CellRef { row, col } = cell;
        let (rows, cols) = (self.rows, self.cols);
        [
            (row > 0).then(|| CellRef::new(row.wrapping_sub(1), col)),
            (col > 0).then(|| CellRef::new(row, col.wrapping_sub(1))),
            (col + 1 < cols).then(|| CellRef::new(row, col + 1)),
            (row + 1 < rows).then(|| CellRef::new(row + 1, col)),
        ]
        .into_iter()
        .flatten()
    }

    /// Pairs of distinct cells in one row or column that carry the same symbol.
    /// Each pair is reported once, first cell earlier in row-major order.
    pub fn duplicate_pairs(&self) -> Vec<(CellRef, CellRef)> {
        let mut pairs = Vec::new();
        for a in self.cells() {
            let s = self.symbol(a);
            for col in a.col + 1..self.cols {
                let b = CellRef::new(a.row, col);
                if self.symbol(b) == s {
                    pairs.push((a, b));
                }
            }
            for row in a.row + 1..self.rows {
                let b = CellRef::new(row, a.col);
                if self.symbol(b) == s {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// Edge-adjacent pairs: each cell with its right neighbour, then its lower neighbour.
    pub fn adjacent_pairs(&self) -> Vec<(CellRef, CellRef)> {
        let mut pairs = Vec::new();
        for a in self.cells() {
            if a.col + 1 < self.cols {
                pairs.push((a, CellRef::new(a.row, a.col + 1)));
            }
            if a.row + 1 < self.rows {
                pairs.push((a, CellRef::new(a.row + 1, a.col)));
            }
        }
        pairs
    }

    /// Raw symbol matrix, one line per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|col| self.symbol(CellRef::new(row, col)).to_string())
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn symbol_rows(&self) -> Vec<Vec<u32>> {
        self.symbols
            .chunks(self.cols)
            .map(<[u32]>::to_vec)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = PuzzleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_puzzle(s)
    }
}

/// Parses the puzzle file format: rows of whitespace-separated positive integers.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_puzzle(text: &str) -> Result<Grid, PuzzleError> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for token in trimmed.split_whitespace() {
            let value = token
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| PuzzleError::BadToken {
                    line: lineno + 1,
                    token: token.to_string(),
                })?;
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(PuzzleError::RaggedRows {
                    line: lineno + 1,
                    expected: w,
                    found: row.len(),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(PuzzleError::Empty);
    }
    let (m, n) = (rows.len(), rows[0].len());
    if m > MAX_DIM || n > MAX_DIM {
        return Err(PuzzleError::TooLarge { rows: m, cols: n });
    }
    Grid::new(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Shaded,
    Unshaded,
    Unknown,
}

/// Per-cell shading status for one grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShadingState {
    rows: usize,
    cols: usize,
    cells: Vec<CellStatus>,
}

impl ShadingState {
    pub fn unknown(rows: usize, cols: usize) -> Self {
        ShadingState {
            rows,
            cols,
            cells: vec![CellStatus::Unknown; rows * cols],
        }
    }

    pub fn for_grid(grid: &Grid) -> Self {
        Self::unknown(grid.rows(), grid.cols())
    }

    /// Complete state with exactly the given cells shaded.
    pub fn from_shaded(grid: &Grid, shaded: impl IntoIterator<Item = CellRef>) -> Self {
        let mut state = ShadingState {
            rows: grid.rows(),
            cols: grid.cols(),
            cells: vec![CellStatus::Unshaded; grid.len()],
        };
        for cell in shaded {
            state.set(cell, CellStatus::Shaded);
        }
        state
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, cell: CellRef) -> CellStatus {
        self.cells[cell.row * self.cols + cell.col]
    }

    pub fn set(&mut self, cell: CellRef, status: CellStatus) {
        self.cells[cell.row * self.cols + cell.col] = status;
    }

    pub fn is_complete(&self) -> bool {
        !self.cells.contains(&CellStatus::Unknown)
    }

    pub fn is_shaded(&self, cell: CellRef) -> bool {
        self.get(cell) == CellStatus::Shaded
    }

    /// Cells with the given status in row-major order.
    pub fn cells_with(&self, status: CellStatus) -> Vec<CellRef> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == status)
            .map(|(i, _)| CellRef::new(i / self.cols, i % self.cols))
            .collect()
    }

    pub fn shaded_cells(&self) -> Vec<CellRef> {
        self.cells_with(CellStatus::Shaded)
    }

    pub fn statuses(&self) -> &[CellStatus] {
        &self.cells
    }

    pub fn status_rows(&self) -> Vec<Vec<CellStatus>> {
        self.cells
            .chunks(self.cols)
            .map(<[CellStatus]>::to_vec)
            .collect()
    }

    fn check_dims(&self, grid: &Grid) -> Result<(), PuzzleError> {
        if self.rows != grid.rows() || self.cols != grid.cols() {
            return Err(PuzzleError::DimensionMismatch {
                rows: grid.rows(),
                cols: grid.cols(),
                found_rows: self.rows,
                found_cols: self.cols,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Uniqueness,
    Separation,
    Connection,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Uniqueness => "uniqueness",
            Rule::Separation => "separation",
            Rule::Connection => "connection",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// The first violated rule with witness cells. For connection, the witnesses are
    /// the first unshaded cell and the first unshaded cell it cannot reach, or the only cell when
    /// nothing is unshaded.
    Violation(Rule, Vec<CellRef>),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks a complete shading against the three rules, in rule order, row-major within a rule.
/// Unknown cells are treated as unshaded.
pub fn check_solution(grid: &Grid, state: &ShadingState) -> Result<Verdict, PuzzleError> {
    state.check_dims(grid)?;
    for (a, b) in grid.duplicate_pairs() {
        if !state.is_shaded(a) && !state.is_shaded(b) {
            return Ok(Verdict::Violation(Rule::Uniqueness, vec![a, b]));
        }
    }
    for (a, b) in grid.adjacent_pairs() {
        if state.is_shaded(a) && state.is_shaded(b) {
            return Ok(Verdict::Violation(Rule::Separation, vec![a, b]));
        }
    }
    let open: Vec<bool> = grid.cells().map(|c| !state.is_shaded(c)).collect();
    let Some(start) = open.iter().position(|&o| o) else {
        // nothing unshaded: only possible for a 1x1 grid
        return Ok(Verdict::Violation(Rule::Connection, vec![grid.cell_at(0)]));
    };
    let mut seen = vec![false; grid.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for nb in grid.neighbors(grid.cell_at(i)) {
            let j = grid.index(nb);
            if open[j] && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    if let Some(lost) = (0..grid.len()).find(|&i| open[i] && !seen[i]) {
        return Ok(Verdict::Violation(
            Rule::Connection,
            vec![grid.cell_at(start), grid.cell_at(lost)],
        ));
    }
    Ok(Verdict::Valid)
}

/// One text row per grid row: `#` shaded, `?` unknown, the symbol otherwise.
pub fn render_state(grid: &Grid, state: &ShadingState) -> Result<String, PuzzleError> {
    state.check_dims(grid)?;
    let mut lines = Vec::with_capacity(grid.rows());
    for row in 0..grid.rows() {
        let line: Vec<String> = (0..grid.cols())
            .map(|col| {
                let cell = CellRef::new(row, col);
                match state.get(cell) {
                    CellStatus::Shaded => "#".to_string(),
                    CellStatus::Unknown => "?".to_string(),
                    CellStatus::Unshaded => grid.symbol(cell).to_string(),
                }
            })
            .collect();
        lines.push(line.join(" "));
    }
    Ok(lines.join("\n"))
}
