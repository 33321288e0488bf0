//! Weak and strong encodings of a grid, with the sentence behind each unit clause.

use hitori_core::cnf::{clause_reason_text, encode_strong, encode_weak};
use hitori_core::grid::parse_puzzle;

fn main() {
    let grid = parse_puzzle("5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2").unwrap();
    let weak = encode_weak(&grid);
    let strong = encode_strong(&grid);
    println!(
        "weak: {} vars, {} clauses",
        weak.num_vars(),
        weak.clauses().len()
    );
    println!(
        "strong: {} vars, {} clauses",
        strong.num_vars(),
        strong.clauses().len()
    );
    for clause in weak.clauses().iter().filter(|c| c.is_unit()) {
        println!("unit: {}", clause_reason_text(clause).unwrap());
    }
    let dimacs = strong.to_dimacs();
    println!(
        "strong DIMACS starts with:\n{}",
        dimacs.lines().take(3).collect::<Vec<_>>().join("\n")
    );
}
