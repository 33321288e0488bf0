//! Grid-graph components, articulation points, and connectivity pictures.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, Cnf, Lit, ReasonTag};
use crate::grid::{CellRef, Grid};
use crate::proof::{ProofNode, WeakProver};
use crate::sat::{backbone, SatError, SolverConfig};

/// Cells of a rows x cols grid that are still available, with orthogonal adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellGraph {
    rows: usize,
    cols: usize,
    present: Vec<bool>,
}

impl CellGraph {
    pub fn full(rows: usize, cols: usize) -> Self {
        CellGraph {
            rows,
            cols,
            present: vec![true; rows * cols],
        }
    }

    pub fn without(rows: usize, cols: usize, removed: impl IntoIterator<Item = CellRef>) -> Self {
        let mut g = CellGraph::full(rows, cols);
        for c in removed {
            g.remove(c);
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, cell: CellRef) -> bool {
        cell.row < self.rows
            && cell.col < self.cols
            && self.present[cell.row * self.cols + cell.col]
    }

    pub fn remove(&mut self, cell: CellRef) {
        if cell.row < self.rows && cell.col < self.cols {
            self.present[cell.row * self.cols + cell.col] = false;
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn vertices(&self) -> impl Iterator<Item = CellRef> + '_ {
        (0..self.present.len())
            .filter(|&i| self.present[i])
            .map(|i| CellRef::new(i / self.cols, i % self.cols))
    }

    fn neighbor_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = (i / self.cols, i % self.cols);
        [
            (r > 0).then(|| i - self.cols),
            (c > 0).then(|| i - 1),
            (c + 1 < self.cols).then(|| i + 1),
            (r + 1 < self.rows).then(|| i + self.cols),
        ]
        .into_iter()
        .flatten()
        .filter(|&j| self.present[j])
    }

    /// Component label per cell (`None` for removed cells). Labels follow the row-major order
    /// of each component's first cell.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let mut label = vec![None; self.present.len()];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.present.len() {
            if !self.present[start] || label[start].is_some() {
                continue;
            }
            label[start] = Some(next);
            stack.push(start);
            while let Some(v) = stack.pop() {
                for w in self.neighbor_indices(v) {
                    if label[w].is_none() {
                        label[w] = Some(next);
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Maximal connected vertex sets, each sorted row-major, ordered by their first cell.
pub fn components(g: &CellGraph) -> Vec<Vec<CellRef>> {
    let labels = g.labels();
    let count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            out[*l].push(CellRef::new(i / g.cols, i % g.cols));
        }
    }
    out
}

/// Vertices whose removal increases the number of components, row-major.
pub fn articulation_points(g: &CellGraph) -> Vec<CellRef> {
    let n = g.present.len();
    let mut disc = vec![0u32; n];
    let mut low = vec![0u32; n];
    let mut is_cut = vec![false; n];
    let mut time = 1u32;
    // Iterative depth-first search: (vertex, parent, neighbour cursor, child count).
    let mut stack: Vec<(usize, usize, usize, u32)> = Vec::new();
    for root in 0..n {
        if !g.present[root] || disc[root] != 0 {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, 0, 0));
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, parent, cursor, _) = stack[top];
            let next = g.neighbor_indices(v).nth(cursor);
            stack[top].2 += 1;
            match next {
                Some(w) if disc[w] == 0 => {
                    stack[top].3 += 1;
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0, 0));
                }
                Some(w) => {
                    if w != parent {
                        low[v] = low[v].min(disc[w]);
                    }
                }
                None => {
                    let (v, parent, _, children) = stack.pop().unwrap();
                    if parent == usize::MAX {
                        if children > 1 {
                            is_cut[v] = true;
                        }
                    } else {
                        low[parent] = low[parent].min(low[v]);
                        if stack.last().is_some_and(|f| f.1 != usize::MAX) && low[v] >= disc[parent]
                        {
                            is_cut[parent] = true;
                        }
                    }
                }
            }
        }
    }
    (0..n)
        .filter(|&i| is_cut[i])
        .map(|i| CellRef::new(i / g.cols, i % g.cols))
        .collect()
}

/// How a cell is drawn in a picture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellClass {
    /// In the component of the first must-be-unshaded cell.
    #[serde(rename = ".")]
    Main,
    /// In some other component.
    #[serde(rename = "-")]
    Other,
    /// Shaded as a consequence of the assumption.
    #[serde(rename = "x")]
    Forced,
    /// Shaded before this step.
    #[serde(rename = "X")]
    Previous,
}

impl CellClass {
    pub fn symbol(self) -> char {
        match self {
            CellClass::Main => '.',
            CellClass::Other => '-',
            CellClass::Forced => 'x',
            CellClass::Previous => 'X',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        Some(match ch {
            '.' => CellClass::Main,
            '-' => CellClass::Other,
            'x' => CellClass::Forced,
            'X' => CellClass::Previous,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PictureVerdict {
    /// Cells that must stay unshaded fall into two or more components.
    Disconnected,
    /// Keeping the cut cells unshaded makes the weak constraints fail by propagation.
    ArticulationUnsat {
        points: Vec<CellRef>,
        refutation: ProofNode,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PictureProof {
    pub rows: usize,
    pub cols: usize,
    pub assumed: CellRef,
    /// True when the picture assumes the cell shaded (proving it unshaded).
    pub assumed_shaded: bool,
    /// Shaded in every weak model under the assumption, excluding cells shaded before this step.
    pub forced_shaded: Vec<CellRef>,
    pub must_unshaded: Vec<CellRef>,
    pub previously_shaded: Vec<CellRef>,
    pub components: Vec<Vec<CellRef>>,
    /// Cut cells asserted unshaded on the way to the verdict.
    pub articulation_points: Vec<CellRef>,
    pub verdict: PictureVerdict,
}

impl PictureProof {
    /// Per-cell classification, row by row.
    pub fn classes(&self) -> Vec<Vec<CellClass>> {
        let mut out = vec![vec![CellClass::Other; self.cols]; self.rows];
        let main = self
            .must_unshaded
            .iter()
            .min()
            .and_then(|first| self.components.iter().position(|c| c.contains(first)));
        for (k, comp) in self.components.iter().enumerate() {
            let class = if Some(k) == main {
                CellClass::Main
            } else {
                CellClass::Other
            };
            for c in comp {
                out[c.row][c.col] = class;
            }
        }
        for c in &self.forced_shaded {
            out[c.row][c.col] = CellClass::Forced;
        }
        for c in &self.previously_shaded {
            out[c.row][c.col] = CellClass::Previous;
        }
        out
    }

    pub fn is_disconnected(&self) -> bool {
        self.verdict == PictureVerdict::Disconnected
    }
}

/// Space-separated grid of `.`, `-`, `x`, `X`, one line per row.
pub fn render_picture(p: &PictureProof) -> String {
    render_classes(&p.classes())
}

pub fn render_classes(classes: &[Vec<CellClass>]) -> String {
    classes
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.symbol().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Reads back the output of [`render_picture`].
pub fn parse_picture(text: &str) -> Option<Vec<Vec<CellClass>>> {
    text.lines()
        .map(|line| {
            line.split_whitespace()
                .map(|t| {
                    let mut chars = t.chars();
                    match (chars.next(), chars.next()) {
                        (Some(ch), None) => CellClass::from_symbol(ch),
                        _ => None,
                    }
                })
                .collect()
        })
        .collect()
}

impl fmt::Display for PictureProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_picture(self))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PictureError {
    #[error("the subgoal already has a weak proof")]
    PreconditionViolated,
    #[error("no connectivity picture settles {0}; a strong proof is required")]
    NotProvableWeakly(CellRef),
    #[error("the weak constraints are unsatisfiable without unit refutation")]
    NonUnitUnsat,
    #[error("subgoal is not a cell literal")]
    NotACellLiteral,
    #[error(transparent)]
    Sat(#[from] SatError),
}

struct Split {
    forced_shaded: Vec<CellRef>,
    must_unshaded: Vec<CellRef>,
    graph: CellGraph,
}

fn split(grid: &Grid, cnf: &Cnf, bb: &[Lit]) -> Split {
    let mut forced_shaded = Vec::new();
    let mut must_unshaded = Vec::new();
    for &l in bb {
        if let Some((cell, clear)) = cnf.lit_cell(l) {
            if clear {
                must_unshaded.push(cell);
            } else {
                forced_shaded.push(cell);
            }
        }
    }
    forced_shaded.sort_unstable();
    must_unshaded.sort_unstable();
    let graph = CellGraph::without(grid.rows(), grid.cols(), forced_shaded.iter().copied());
    Split {
        forced_shaded,
        must_unshaded,
        graph,
    }
}

fn spans_components(labels: &[Option<usize>], cols: usize, cells: &[CellRef]) -> bool {
    let mut first = None;
    for c in cells {
        let l = labels[c.row * cols + c.col];
        match first {
            None => first = Some(l),
            Some(f) if f != l => return true,
            _ => {}
        }
    }
    false
}

/// Cut vertices whose removal separates two `must` cells.
fn separating_points(g: &CellGraph, must: &[CellRef]) -> Vec<CellRef> {
    articulation_points(g)
        .into_iter()
        .filter(|ap| !must.contains(ap))
        .filter(|&ap| {
            let mut h = g.clone();
            h.remove(ap);
            spans_components(&h.labels(), g.cols, must)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PictureOptions {
    /// Rounds of cut-vertex units to try; `None` repeats until no new cut vertex appears.
    pub max_rounds: Option<usize>,
}

impl Default for PictureOptions {
    fn default() -> Self {
        PictureOptions {
            max_rounds: Some(1),
        }
    }
}

impl PictureOptions {
    pub fn fixpoint() -> Self {
        PictureOptions { max_rounds: None }
    }
}

/// Connectivity argument for `subgoal` when no weak proof exists, with default options.
pub fn picture_proof(
    grid: &Grid,
    weak: &Cnf,
    established: &[Lit],
    subgoal: Lit,
) -> Result<PictureProof, PictureError> {
    picture_proof_with(grid, weak, established, subgoal, PictureOptions::default())
}

/// Assumes the negation of `subgoal`, computes the weak backbone over the cell variables, and
/// looks for must-be-unshaded cells in different components of the remaining grid. Failing
/// that, cut vertices separating such cells are asserted unshaded and propagation is retried.
/// Later rounds recompute the backbone with those units; if they leave no weak model, the
/// propagated values stand in for it.
pub fn picture_proof_with(
    grid: &Grid,
    weak: &Cnf,
    established: &[Lit],
    subgoal: Lit,
    options: PictureOptions,
) -> Result<PictureProof, PictureError> {
    let (assumed, clear) = weak
        .lit_cell(subgoal)
        .ok_or(PictureError::NotACellLiteral)?;
    if WeakProver::new(weak, established).refute(subgoal).is_some() {
        return Err(PictureError::PreconditionViolated);
    }
    let mut assumptions = established.to_vec();
    assumptions.push(!subgoal);
    let previously_shaded: Vec<CellRef> = {
        let mut v: Vec<CellRef> = established
            .iter()
            .filter_map(|&l| weak.lit_cell(l))
            .filter(|&(_, clear)| !clear)
            .map(|(c, _)| c)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let scope = weak.cell_vars();
    let mut cnf = weak.clone();
    let mut points: Vec<CellRef> = Vec::new();
    let mut rounds = 0;
    loop {
        let bb = match backbone(&cnf, &assumptions, &scope, SolverConfig::default()) {
            Ok(bb) => bb,
            // The cut units leave no weak model; continue from what propagation shows.
            Err(SatError::NotSatisfiable) if !points.is_empty() => {
                let prover = WeakProver::new(&cnf, &assumptions);
                scope
                    .iter()
                    .map(|&v| v.positive())
                    .filter_map(|l| prover.value(l).map(|b| if b { l } else { !l }))
                    .collect()
            }
            Err(SatError::NotSatisfiable) => return Err(PictureError::NonUnitUnsat),
            Err(e) => return Err(e.into()),
        };
        let s = split(grid, &cnf, &bb);
        let labels = s.graph.labels();
        let build = |verdict: PictureVerdict, s: Split, points: &[CellRef]| PictureProof {
            rows: grid.rows(),
            cols: grid.cols(),
            assumed,
            assumed_shaded: clear,
            forced_shaded: s
                .forced_shaded
                .into_iter()
                .filter(|c| !previously_shaded.contains(c))
                .collect(),
            must_unshaded: s.must_unshaded,
            previously_shaded: previously_shaded.clone(),
            components: components(&s.graph),
            articulation_points: {
                let mut v = points.to_vec();
                v.sort_unstable();
                v
            },
            verdict,
        };
        if spans_components(&labels, grid.cols(), &s.must_unshaded) {
            return Ok(build(PictureVerdict::Disconnected, s, &points));
        }
        let fresh = separating_points(&s.graph, &s.must_unshaded);
        if fresh.is_empty() || options.max_rounds.is_some_and(|m| rounds >= m) {
            return Err(PictureError::NotProvableWeakly(assumed));
        }
        for &ap in &fresh {
            cnf.push(Clause::new(
                [cnf.cell_lit(ap, true)],
                ReasonTag::ArticulationPoint(ap),
            ));
        }
        points.extend(fresh);
        rounds += 1;
        if let Some(refutation) = WeakProver::new(&cnf, established).refute(subgoal) {
            let mut sorted = points.clone();
            sorted.sort_unstable();
            return Ok(build(
                PictureVerdict::ArticulationUnsat {
                    points: sorted,
                    refutation,
                },
                s,
                &points,
            ));
        }
    }
}

/// The weak formula extended with the articulation units a picture relied on.
pub fn picture_source(weak: &Cnf, picture: &PictureProof) -> Cnf {
    weak.with_clauses(
        picture
            .articulation_points
            .iter()
            .map(|&ap| Clause::new([weak.cell_lit(ap, true)], ReasonTag::ArticulationPoint(ap))),
    )
}

/// For each newly forced cell other than the assumed one, a weak proof that the assumption
/// shades it, when propagation finds one.
pub fn forced_cell_proofs(
    weak: &Cnf,
    established: &[Lit],
    picture: &PictureProof,
) -> Vec<(CellRef, Option<ProofNode>)> {
    let mut base = established.to_vec();
    base.push(weak.cell_lit(picture.assumed, !picture.assumed_shaded));
    let mut prover = WeakProver::new(weak, &base);
    picture
        .forced_shaded
        .iter()
        .filter(|&&c| c != picture.assumed)
        .map(|&c| (c, prover.refute(weak.cell_lit(c, false))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(g: &[(usize, usize)]) -> Vec<CellRef> {
        g.iter().map(|&(r, c)| CellRef::new(r, c)).collect()
    }

    #[test]
    fn full_grid_is_one_component() {
        let g = CellGraph::full(5, 5);
        let comps = components(&g);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 25);
    }

    #[test]
    fn corner_removed() {
        let g = CellGraph::without(3, 3, cells(&[(0, 0)]));
        let comps = components(&g);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 8);
    }

    #[test]
    fn path_has_middle_cut() {
        let g = CellGraph::full(1, 3);
        assert_eq!(articulation_points(&g), cells(&[(0, 1)]));
    }

    #[test]
    fn block_has_no_cut() {
        assert!(articulation_points(&CellGraph::full(2, 2)).is_empty());
        assert!(articulation_points(&CellGraph::full(1, 1)).is_empty());
        assert!(articulation_points(&CellGraph::full(1, 2)).is_empty());
    }

    #[test]
    fn ring_with_a_tail() {
        // 3x3 ring around a removed centre, plus nothing else: no cuts.
        let ring = CellGraph::without(3, 3, cells(&[(1, 1)]));
        assert!(articulation_points(&ring).is_empty());
        // Cut the ring once: it becomes a path whose interior cells are cuts.
        let path = CellGraph::without(3, 3, cells(&[(1, 1), (0, 1)]));
        assert_eq!(articulation_points(&path).len(), 5);
    }

    #[test]
    fn render_round_trip() {
        let classes = vec![
            vec![CellClass::Main, CellClass::Forced],
            vec![CellClass::Previous, CellClass::Other],
        ];
        let text = render_classes(&classes);
        assert_eq!(text, ". x\nX -");
        assert_eq!(parse_picture(&text).unwrap(), classes);
    }
}
