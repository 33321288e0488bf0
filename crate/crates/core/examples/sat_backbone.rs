//! The CDCL solver and backbone on a DIMACS formula.

use hitori_core::sat::{backbone, parse_dimacs, propagate, solve, SolveResult, SolverConfig};

const FORMULA: &str = "p cnf 4 4\n1 2 0\n-1 3 0\n-2 3 0\n-3 -4 0\n";

fn main() {
    let cnf = parse_dimacs(FORMULA).unwrap();
    match solve(&cnf, &[]).unwrap() {
        SolveResult::Sat(model) => println!("model: {model:?}"),
        SolveResult::Unsat => println!("unsatisfiable"),
    }
    let scope: Vec<_> = (0..cnf.num_vars() as u32)
        .map(hitori_core::cnf::Var)
        .collect();
    let bb = backbone(&cnf, &[], &scope, SolverConfig::default()).unwrap();
    let shown: Vec<i64> = bb.iter().map(|l| l.to_dimacs()).collect();
    println!("backbone: {shown:?}");
    let trace = propagate(&cnf, &[hitori_core::cnf::Lit::from_dimacs(-3).unwrap()]);
    for e in &trace.entries {
        println!("propagated {} ({:?})", e.lit.to_dimacs(), e.antecedent);
    }
    println!("conflict: {:?}", trace.conflict);
}
