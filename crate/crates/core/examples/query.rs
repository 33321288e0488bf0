//! Ask "why?" about a cell at some point in the plan.
//!
//! `cargo run -p hitori-core --example query [CELL] [STEP]`

use hitori_core::grid::parse_puzzle;
use hitori_core::staging::{stage, QueryResult, StageContext, Technique};

fn main() {
    let mut args = std::env::args().skip(1);
    let cell = args
        .next()
        .unwrap_or_else(|| "r1c2".to_string())
        .parse()
        .unwrap();
    let at: usize = args.next().map_or(5, |s| s.parse().unwrap());
    let grid = parse_puzzle("5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2").unwrap();
    let plan = stage(&grid).unwrap();
    let ctx = StageContext::at_step(&plan, at).unwrap();
    match ctx.query_cell(cell) {
        Ok(QueryResult::Derived {
            subgoal,
            technique,
            reasons,
        }) => {
            println!("{} is {}", subgoal.cell, subgoal.value_word());
            match technique {
                Technique::WeakProof { proof, .. } => println!("{}", proof.pretty()),
                Technique::Picture(p) => println!("{p}"),
            }
            for r in reasons {
                println!("  {}: {}", r.clause, r.reason);
            }
        }
        Ok(QueryResult::NotYetDerivable {
            subgoal, violates, ..
        }) => {
            println!(
                "{} cannot be settled yet; the other value breaks {violates:?}",
                subgoal.cell
            )
        }
        Err(e) => println!("{e}"),
    }
}
