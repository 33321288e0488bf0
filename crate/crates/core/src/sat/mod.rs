//! SAT solving, propagation traces, and backbones.

mod backbone;
mod dimacs;
mod propagate;
mod solver;

pub use backbone::backbone;
pub use dimacs::parse_dimacs;
pub use propagate::{
    propagate, replay_trace, Antecedent, Conflict, PropagationTrace, Propagator, TraceEntry,
};
pub use solver::{solve, Polarity, SolveResult, Solver, SolverConfig, SolverStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("assumptions contain both polarities of variable {0}")]
    ContradictoryAssumptions(u64),
    #[error("variable {0} is not registered")]
    UnknownVariable(u32),
    #[error("formula is not satisfiable under the given assumptions")]
    NotSatisfiable,
    #[error("DIMACS line {line}: {message}")]
    Dimacs { line: usize, message: String },
}
