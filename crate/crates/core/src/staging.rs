//! Greedy ordering of per-cell subgoals into an explanation plan.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{
    blocking_clause, clause_reason_text, encode_strong, encode_weak, shading_from_model, Cnf, Lit,
};
use crate::connectivity::{
    picture_proof, picture_proof_with, picture_source, render_picture, CellClass, PictureError,
    PictureOptions, PictureProof, PictureVerdict,
};
use crate::grid::{check_solution, CellRef, CellStatus, Grid, Rule, ShadingState, Verdict};
use crate::proof::{proof_size, ProofNode, WeakProofOutcome, WeakProver};
use crate::sat::{SolveResult, Solver};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StagingError {
    #[error("the puzzle has no solution")]
    NoSolution,
    #[error("the puzzle has more than one solution; they differ at {}", cell_list(.differing))]
    NonUniqueSolution {
        first: ShadingState,
        second: ShadingState,
        differing: Vec<CellRef>,
    },
    #[error("{0} needs a strong proof: no weak proof or connectivity picture settles any remaining cell")]
    StrongProofRequired(CellRef),
    #[error("{0}: the weak constraints refute it only by non-unit resolution")]
    NonUnitUnsat(CellRef),
    #[error("step {index} is out of range (plan has {len} steps)")]
    IndexOutOfRange { index: usize, len: usize },
}

fn cell_list(cells: &[CellRef]) -> String {
    cells
        .iter()
        .map(CellRef::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Proving one cell's value in the unique solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgoal {
    pub cell: CellRef,
    pub shaded: bool,
}

impl Subgoal {
    pub fn lit(self, cnf: &Cnf) -> Lit {
        cnf.cell_lit(self.cell, !self.shaded)
    }

    pub fn status(self) -> CellStatus {
        if self.shaded {
            CellStatus::Shaded
        } else {
            CellStatus::Unshaded
        }
    }

    /// "shaded" or "unshaded".
    pub fn value_word(self) -> &'static str {
        if self.shaded {
            "shaded"
        } else {
            "unshaded"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Technique {
    WeakProof { proof: ProofNode, size: usize },
    Picture(PictureProof),
}

impl Technique {
    pub fn is_picture(&self) -> bool {
        matches!(self, Technique::Picture(_))
    }
}

/// A clause used by a proof and why it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseReason {
    pub clause: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// 1-based.
    pub index: usize,
    pub subgoal: Subgoal,
    pub technique: Technique,
    pub before: ShadingState,
    pub after: ShadingState,
    pub reasons: Vec<ClauseReason>,
}

impl StepRecord {
    /// Proof text for weak steps, the picture for picture steps.
    pub fn display_text(&self) -> String {
        match &self.technique {
            Technique::WeakProof { proof, .. } => proof.pretty(),
            Technique::Picture(p) => format!(
                "Step {}. Connectedness lost if {} is {}\nASCII grid:\n{}",
                self.index,
                p.assumed,
                if p.assumed_shaded {
                    "shaded"
                } else {
                    "unshaded"
                },
                render_picture(p)
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanTotals {
    pub weak_steps: usize,
    pub picture_steps: usize,
    /// Sum of canonical proof sizes over weak steps.
    pub total_chars: usize,
    pub max_chars: usize,
}

impl PlanTotals {
    pub fn mean_chars(&self) -> f64 {
        if self.weak_steps == 0 {
            0.0
        } else {
            self.total_chars as f64 / self.weak_steps as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagingPlan {
    pub grid: Grid,
    pub solution: ShadingState,
    pub steps: Vec<StepRecord>,
    pub totals: PlanTotals,
}

/// The unique solution, checked with the full encoding and a blocking clause.
pub fn solve_unique(grid: &Grid) -> Result<ShadingState, StagingError> {
    let strong = encode_strong(grid);
    let mut solver = Solver::new(&strong);
    let first = match solver.solve(&[]) {
        Ok(SolveResult::Sat(model)) => shading_from_model(grid, &strong, &model),
        _ => return Err(StagingError::NoSolution),
    };
    debug_assert_eq!(check_solution(grid, &first), Ok(Verdict::Valid));
    let block = blocking_clause(&strong, &first);
    solver.add_clause(block.lits().to_vec());
    match solver.solve(&[]) {
        Ok(SolveResult::Sat(model)) => {
            let second = shading_from_model(grid, &strong, &model);
            let differing = grid
                .cells()
                .filter(|&c| first.get(c) != second.get(c))
                .collect();
            Err(StagingError::NonUniqueSolution {
                first,
                second,
                differing,
            })
        }
        _ => Ok(first),
    }
}

/// Looks up formula clauses by literal set to attach reason sentences to proof leaves.
pub struct ReasonIndex<'a> {
    cnf: &'a Cnf,
    by_lits: HashMap<Vec<Lit>, usize>,
}

impl<'a> ReasonIndex<'a> {
    pub fn new(cnf: &'a Cnf) -> Self {
        let mut by_lits = HashMap::new();
        for (i, c) in cnf.clauses().iter().enumerate() {
            by_lits.entry(c.lits().to_vec()).or_insert(i);
        }
        ReasonIndex { cnf, by_lits }
    }

    /// Reasons for the formula clauses among the proof's leaves, in order of first appearance.
    /// Leaves that are only assumptions have no entry.
    pub fn reasons(&self, proof: &ProofNode) -> Vec<ClauseReason> {
        let mut out: Vec<ClauseReason> = Vec::new();
        for leaf in proof.leaves() {
            let Some(mut lits) = leaf
                .lits()
                .iter()
                .map(|l| l.to_lit(self.cnf))
                .collect::<Option<Vec<Lit>>>()
            else {
                continue;
            };
            lits.sort_unstable();
            let Some(&ci) = self.by_lits.get(&lits) else {
                continue;
            };
            let Ok(reason) = clause_reason_text(&self.cnf.clauses()[ci]) else {
                continue;
            };
            let clause = leaf.to_string();
            if !out.iter().any(|r| r.clause == clause) {
                out.push(ClauseReason { clause, reason });
            }
        }
        out
    }
}

fn state_from(grid: &Grid, cnf: &Cnf, established: &[Lit]) -> ShadingState {
    let mut s = ShadingState::for_grid(grid);
    for &l in established {
        if let Some((cell, clear)) = cnf.lit_cell(l) {
            s.set(
                cell,
                if clear {
                    CellStatus::Unshaded
                } else {
                    CellStatus::Shaded
                },
            );
        }
    }
    s
}

/// Current position in a plan: the grid, its weak encoding, its solution, and the facts
/// established so far.
#[derive(Clone, Debug)]
pub struct StageContext {
    pub grid: Grid,
    pub weak: Cnf,
    pub solution: ShadingState,
    pub established: Vec<Lit>,
}

/// Answer to "why is this cell what it is?" at some stage.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum QueryResult {
    Derived {
        subgoal: Subgoal,
        technique: Technique,
        reasons: Vec<ClauseReason>,
    },
    /// Neither a weak proof nor a picture settles the cell yet. `counterexample` satisfies the
    /// weak constraints and the established facts with the cell flipped; `violates` is the
    /// rule it breaks, if any.
    NotYetDerivable {
        subgoal: Subgoal,
        counterexample: Option<ShadingState>,
        violates: Option<Rule>,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("{0} is already resolved")]
    AlreadyResolved(CellRef),
    #[error("{0} is outside the grid")]
    OutOfBounds(CellRef),
}

impl StageContext {
    pub fn new(grid: &Grid, solution: ShadingState) -> Self {
        StageContext {
            grid: grid.clone(),
            weak: encode_weak(grid),
            solution,
            established: Vec::new(),
        }
    }

    /// Context after the first `k` steps of `plan`.
    pub fn at_step(plan: &StagingPlan, k: usize) -> Result<Self, StagingError> {
        if k > plan.steps.len() {
            return Err(StagingError::IndexOutOfRange {
                index: k,
                len: plan.steps.len(),
            });
        }
        let mut ctx = StageContext::new(&plan.grid, plan.solution.clone());
        ctx.established = plan.steps[..k]
            .iter()
            .map(|s| s.subgoal.lit(&ctx.weak))
            .collect();
        Ok(ctx)
    }

    pub fn subgoal(&self, cell: CellRef) -> Subgoal {
        Subgoal {
            cell,
            shaded: self.solution.is_shaded(cell),
        }
    }

    pub fn state(&self) -> ShadingState {
        state_from(&self.grid, &self.weak, &self.established)
    }

    pub fn is_resolved(&self, cell: CellRef) -> bool {
        let var = self.weak.cell_lit(cell, true).var();
        self.established.iter().any(|l| l.var() == var)
    }

    /// Tries a weak proof, then a picture, for the cell's solution value.
    pub fn query_cell(&self, cell: CellRef) -> Result<QueryResult, QueryError> {
        if !self.grid.contains(cell) {
            return Err(QueryError::OutOfBounds(cell));
        }
        if self.is_resolved(cell) {
            return Err(QueryError::AlreadyResolved(cell));
        }
        let subgoal = self.subgoal(cell);
        let goal = subgoal.lit(&self.weak);
        let mut prover = WeakProver::new(&self.weak, &self.established);
        let witness = match prover.derive(goal) {
            WeakProofOutcome::Proof(proof) => {
                let reasons = ReasonIndex::new(&self.weak).reasons(&proof);
                let size = proof_size(&proof);
                return Ok(QueryResult::Derived {
                    subgoal,
                    technique: Technique::WeakProof { proof, size },
                    reasons,
                });
            }
            WeakProofOutcome::NoWeakProof(model) => Some(model),
            WeakProofOutcome::NonUnitUnsat => None,
        };
        if witness.is_some() {
            if let Ok(p) = picture_proof(&self.grid, &self.weak, &self.established, goal) {
                let reasons = picture_reasons(&self.weak, &p);
                return Ok(QueryResult::Derived {
                    subgoal,
                    technique: Technique::Picture(p),
                    reasons,
                });
            }
        }
        let counterexample = witness.map(|m| shading_from_model(&self.grid, &self.weak, &m));
        let violates = counterexample
            .as_ref()
            .and_then(|s| match check_solution(&self.grid, s) {
                Ok(Verdict::Violation(rule, _)) => Some(rule),
                _ => None,
            });
        Ok(QueryResult::NotYetDerivable {
            subgoal,
            counterexample,
            violates,
        })
    }
}

fn picture_reasons(weak: &Cnf, p: &PictureProof) -> Vec<ClauseReason> {
    match &p.verdict {
        PictureVerdict::Disconnected => Vec::new(),
        PictureVerdict::ArticulationUnsat { refutation, .. } => {
            let source = picture_source(weak, p);
            ReasonIndex::new(&source).reasons(refutation)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageOptions {
    /// Spread the per-round subgoal scans over worker threads.
    pub parallel: bool,
    pub picture: PictureOptions,
}

impl Default for StageOptions {
    fn default() -> Self {
        StageOptions {
            parallel: true,
            picture: PictureOptions::default(),
        }
    }
}

pub fn stage(grid: &Grid) -> Result<StagingPlan, StagingError> {
    stage_with(grid, StageOptions::default())
}

/// Runs the greedy staging loop to completion.
///
/// Each round every remaining subgoal is refuted by propagation and the smallest proof wins
/// (ties: row-major cell). When none has a weak proof, the row-major-first subgoal with a
/// connectivity picture is taken.
pub fn stage_with(grid: &Grid, options: StageOptions) -> Result<StagingPlan, StagingError> {
    let solution = solve_unique(grid)?;
    let mut ctx = StageContext::new(grid, solution.clone());
    let reasons = ReasonIndex::new(&ctx.weak);
    let mut remaining: Vec<Subgoal> = grid.cells().map(|c| ctx.subgoal(c)).collect();
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut totals = PlanTotals::default();

    while !remaining.is_empty() {
        let before = ctx.state();
        let prover = WeakProver::new(&ctx.weak, &ctx.established);
        let weak = &ctx.weak;
        let refute = |p: &mut WeakProver, g: &Subgoal| {
            p.refute(g.lit(weak))
                .map(|proof| (proof_size(&proof), proof))
        };
        let found: Vec<Option<(usize, ProofNode)>> = if options.parallel {
            remaining
                .par_iter()
                .map_with(prover.clone(), |p, g| refute(p, g))
                .collect()
        } else {
            let mut p = prover.clone();
            remaining.iter().map(|g| refute(&mut p, g)).collect()
        };
        // `remaining` is row-major, so the first minimum is the tie-break winner.
        let best = found
            .into_iter()
            .enumerate()
            .filter_map(|(i, f)| f.map(|(size, proof)| (size, i, proof)))
            .min_by_key(|(size, i, _)| (*size, *i));

        let (pos, technique, step_reasons) = match best {
            Some((size, i, proof)) => {
                let r = reasons.reasons(&proof);
                (i, Technique::WeakProof { proof, size }, r)
            }
            None => {
                let established = &ctx.established;
                let try_picture = |g: &Subgoal| -> Result<PictureProof, PictureError> {
                    picture_proof_with(grid, weak, established, g.lit(weak), options.picture)
                };
                let hit = if options.parallel {
                    remaining
                        .par_iter()
                        .enumerate()
                        .filter_map(|(i, g)| try_picture(g).ok().map(|p| (i, p)))
                        .find_first(|_| true)
                } else {
                    remaining
                        .iter()
                        .enumerate()
                        .find_map(|(i, g)| try_picture(g).ok().map(|p| (i, p)))
                };
                match hit {
                    Some((i, p)) => {
                        let r = picture_reasons(weak, &p);
                        (i, Technique::Picture(p), r)
                    }
                    None => return Err(stuck(&prover, &remaining)),
                }
            }
        };

        let subgoal = remaining.remove(pos);
        ctx.established.push(subgoal.lit(&ctx.weak));
        let mut after = before.clone();
        after.set(subgoal.cell, subgoal.status());
        match &technique {
            Technique::WeakProof { size, .. } => {
                totals.weak_steps += 1;
                totals.total_chars += size;
                totals.max_chars = totals.max_chars.max(*size);
            }
            Technique::Picture(_) => totals.picture_steps += 1,
        }
        steps.push(StepRecord {
            index: steps.len() + 1,
            subgoal,
            technique,
            before,
            after,
            reasons: step_reasons,
        });
    }

    Ok(StagingPlan {
        grid: grid.clone(),
        solution,
        steps,
        totals,
    })
}

/// Error for a round where nothing can be proved.
fn stuck(prover: &WeakProver<'_>, remaining: &[Subgoal]) -> StagingError {
    let cnf = prover.cnf();
    for g in remaining {
        if prover.clone().derive(g.lit(cnf)) == WeakProofOutcome::NonUnitUnsat {
            return StagingError::NonUnitUnsat(g.cell);
        }
    }
    StagingError::StrongProofRequired(remaining[0].cell)
}

/// Board after the first `k` steps; `k = 0` is all unknown.
pub fn board_state_after(plan: &StagingPlan, k: usize) -> Result<ShadingState, StagingError> {
    if k > plan.steps.len() {
        return Err(StagingError::IndexOutOfRange {
            index: k,
            len: plan.steps.len(),
        });
    }
    Ok(match k {
        0 => ShadingState::for_grid(&plan.grid),
        k => plan.steps[k - 1].after.clone(),
    })
}

/// One plan step as a self-contained document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepExport {
    pub index: usize,
    pub cell: String,
    pub value: String,
    pub technique: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picture: Option<PictureExport>,
    pub reasons: Vec<ClauseReason>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PictureExport {
    pub assumed: String,
    pub assumed_shaded: bool,
    pub verdict: String,
    pub articulation_points: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<String>,
    pub cells: Vec<Vec<CellClass>>,
    pub ascii: String,
}

impl PictureExport {
    pub fn new(p: &PictureProof) -> Self {
        let (verdict, refutation) = match &p.verdict {
            PictureVerdict::Disconnected => ("disconnected", None),
            PictureVerdict::ArticulationUnsat { refutation, .. } => {
                ("articulation", Some(refutation.serialize()))
            }
        };
        let points = p
            .articulation_points
            .iter()
            .map(CellRef::to_string)
            .collect();
        PictureExport {
            assumed: p.assumed.to_string(),
            assumed_shaded: p.assumed_shaded,
            verdict: verdict.to_string(),
            articulation_points: points,
            refutation,
            cells: p.classes(),
            ascii: render_picture(p),
        }
    }
}

impl StepExport {
    pub fn new(step: &StepRecord) -> Self {
        let (technique, proof, size, picture) = match &step.technique {
            Technique::WeakProof { proof, size } => {
                ("weak", Some(proof.serialize()), Some(*size), None)
            }
            Technique::Picture(p) => ("picture", None, None, Some(PictureExport::new(p))),
        };
        StepExport {
            index: step.index,
            cell: step.subgoal.cell.to_string(),
            value: step.subgoal.value_word().to_string(),
            technique: technique.to_string(),
            proof,
            size,
            picture,
            reasons: step.reasons.clone(),
        }
    }
}

/// One JSON object per line, one line per step.
pub fn plan_to_jsonl(plan: &StagingPlan) -> String {
    let mut out = String::new();
    for step in &plan.steps {
        out.push_str(
            &serde_json::to_string(&StepExport::new(step)).expect("plain data serializes"),
        );
        out.push('\n');
    }
    out
}
