//! Seeded generator of unique-solution puzzles.
//!
//! Symbols start from a cyclic Latin rectangle under random row, column, and symbol
//! permutations. A random valid shading is chosen, each shaded cell copies a symbol from its
//! row or column, and alternative solutions are removed by re-copying shaded symbols until the
//! strong encoding plus a blocking clause is unsatisfiable.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::connectivity::{components, CellGraph};
use crate::grid::{CellRef, Grid, ShadingState};
use crate::staging::{solve_unique, StagingError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorOptions {
    /// Chance that a shading candidate is kept when it is legal.
    pub density: f64,
    /// Shadings tried before giving up.
    pub attempts: usize,
    /// Symbol repairs per shading before a new shading is drawn, at least twice the cell count.
    pub repairs: usize,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            density: 0.6,
            attempts: 64,
            repairs: 200,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenerateError {
    #[error("grid dimensions must be at least 2x2, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("no unique puzzle found for seed {seed}")]
    Exhausted { seed: u64 },
}

/// A generated puzzle with the solution it was built around.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub grid: Grid,
    pub solution: ShadingState,
    pub seed: u64,
}

pub fn generate(rows: usize, cols: usize, seed: u64) -> Result<Generated, GenerateError> {
    generate_with(rows, cols, seed, GeneratorOptions::default())
}

pub fn generate_with(
    rows: usize,
    cols: usize,
    seed: u64,
    options: GeneratorOptions,
) -> Result<Generated, GenerateError> {
    if rows < 2 || cols < 2 {
        return Err(GenerateError::TooSmall { rows, cols });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..options.attempts {
        let base = latin_rectangle(rows, cols, &mut rng);
        let mut shaded = random_shading(rows, cols, options.density, &mut rng);
        if shaded.is_empty() {
            continue;
        }
        let mut symbols = base;
        for &c in &shaded {
            symbols[c.row][c.col] = copied_symbol(&symbols, c, None, &mut rng);
        }
        let budget = options.repairs.max(2 * rows * cols);
        if let Some(grid) = repair(symbols, &mut shaded, budget, &mut rng) {
            let solution = ShadingState::from_shaded(&grid, shaded.iter().copied());
            return Ok(Generated {
                grid,
                solution,
                seed,
            });
        }
    }
    Err(GenerateError::Exhausted { seed })
}

fn latin_rectangle(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let k = rows.max(cols);
    let mut row_perm: Vec<usize> = (0..k).collect();
    let mut col_perm: Vec<usize> = (0..k).collect();
    let mut sym_perm: Vec<u32> = (1..=k as u32).collect();
    row_perm.shuffle(rng);
    col_perm.shuffle(rng);
    sym_perm.shuffle(rng);
    (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| sym_perm[(row_perm[r] + col_perm[c]) % k])
                .collect()
        })
        .collect()
}

/// Shades cells in random order whenever that keeps separation and connection.
fn random_shading(rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<CellRef> {
    let mut order: Vec<CellRef> = (0..rows * cols)
        .map(|i| CellRef::new(i / cols, i % cols))
        .collect();
    order.shuffle(rng);
    let mut graph = CellGraph::full(rows, cols);
    let mut shaded: Vec<CellRef> = Vec::new();
    for c in order {
        if !rng.random_bool(density) {
            continue;
        }
        let touches = shaded
            .iter()
            .any(|s| s.row.abs_diff(c.row) + s.col.abs_diff(c.col) == 1);
        if touches {
            continue;
        }
        let mut trial = graph.clone();
        trial.remove(c);
        if components(&trial).len() == 1 {
            graph = trial;
            shaded.push(c);
        }
    }
    shaded.sort_unstable();
    shaded
}

/// A symbol from another cell in the same row or column, preferring those in `prefer`.
fn copied_symbol(
    symbols: &[Vec<u32>],
    cell: CellRef,
    prefer: Option<&ShadingState>,
    rng: &mut ChaCha8Rng,
) -> u32 {
    let rows = symbols.len();
    let cols = symbols[0].len();
    let peers: Vec<CellRef> = (0..cols)
        .filter(|&c| c != cell.col)
        .map(|c| CellRef::new(cell.row, c))
        .chain(
            (0..rows)
                .filter(|&r| r != cell.row)
                .map(|r| CellRef::new(r, cell.col)),
        )
        .collect();
    let preferred: Vec<CellRef> = match prefer {
        Some(state) => peers
            .iter()
            .copied()
            .filter(|&p| !state.is_shaded(p))
            .collect(),
        None => Vec::new(),
    };
    let pool = if preferred.is_empty() {
        &peers
    } else {
        &preferred
    };
    let p = *pool.choose(rng).expect("grids of at least 2x2 have peers");
    symbols[p.row][p.col]
}

/// Re-copies shaded symbols until `shaded` is the only solution. An alternative that shades
/// every intended cell and more becomes the new intended shading.
fn repair(
    mut symbols: Vec<Vec<u32>>,
    shaded: &mut Vec<CellRef>,
    repairs: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Grid> {
    for _ in 0..repairs {
        let grid = Grid::new(symbols.clone()).ok()?;
        match solve_unique(&grid) {
            Ok(_) => return Some(grid),
            Err(StagingError::NonUniqueSolution { first, second, .. }) => {
                let intended = ShadingState::from_shaded(&grid, shaded.iter().copied());
                let other = if first == intended { second } else { first };
                // Intended-shaded cells left unshaded by the other solution can clash there.
                let targets: Vec<CellRef> = shaded
                    .iter()
                    .copied()
                    .filter(|&c| !other.is_shaded(c))
                    .collect();
                match targets.choose(rng) {
                    Some(&cell) => {
                        symbols[cell.row][cell.col] =
                            copied_symbol(&symbols, cell, Some(&other), rng);
                    }
                    None => *shaded = other.shaded_cells(),
                }
            }
            Err(_) => return None,
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{check_solution, Verdict};

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate(5, 5, 7).unwrap(), generate(5, 5, 7).unwrap());
        assert_ne!(
            generate(5, 5, 7).unwrap().grid,
            generate(5, 5, 8).unwrap().grid
        );
    }

    #[test]
    fn generated_puzzles_are_unique() {
        for seed in 0..5 {
            let g = generate(4, 6, seed).unwrap();
            assert_eq!(check_solution(&g.grid, &g.solution), Ok(Verdict::Valid));
            assert_eq!(solve_unique(&g.grid), Ok(g.solution.clone()));
        }
    }

    #[test]
    fn rejects_tiny_grids() {
        assert_eq!(
            generate(1, 4, 0),
            Err(GenerateError::TooSmall { rows: 1, cols: 4 })
        );
    }
}
