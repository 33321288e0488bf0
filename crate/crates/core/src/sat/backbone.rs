use std::collections::BTreeSet;

use super::solver::{SolveResult, Solver, SolverConfig};
use super::SatError;
use crate::cnf::{Cnf, Lit, Var};

/// Literals over `scope` that hold in every model of `cnf` under `assumptions`.
///
/// Candidates come from the first model; each is tested by assuming its negation. A satisfiable
/// test prunes every candidate its model disagrees with. Proven literals join the assumptions
/// of later tests.
pub fn backbone(
    cnf: &Cnf,
    assumptions: &[Lit],
    scope: &[Var],
    config: SolverConfig,
) -> Result<Vec<Lit>, SatError> {
    let mut solver = Solver::with_config(cnf, config);
    let first = match solver.solve(assumptions)? {
        SolveResult::Sat(model) => model,
        SolveResult::Unsat => return Err(SatError::NotSatisfiable),
    };
    let mut candidates: BTreeSet<Lit> = scope.iter().map(|&v| v.lit(first[v.index()])).collect();
    let mut known: Vec<Lit> = assumptions.to_vec();
    let mut found = Vec::new();
    for &v in scope {
        let lit = v.lit(first[v.index()]);
        if !candidates.contains(&lit) {
            continue;
        }
        if known.contains(&lit) {
            found.push(lit);
            continue;
        }
        let mut query = known.clone();
        query.push(!lit);
        match solver.solve(&query)? {
            SolveResult::Unsat => {
                found.push(lit);
                known.push(lit);
            }
            SolveResult::Sat(model) => {
                candidates.retain(|l| model[l.var().index()] == l.is_positive());
            }
        }
    }
    Ok(found)
}
