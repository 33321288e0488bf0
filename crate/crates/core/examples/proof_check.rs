//! Derive, print, parse, and check a weak proof.

use hitori_core::cnf::encode_weak;
use hitori_core::grid::parse_puzzle;
use hitori_core::proof::{
    check_proof, derive_weak_proof, parse_proof, proof_size, WeakProofOutcome,
};

fn main() {
    let grid = parse_puzzle("5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2").unwrap();
    let weak = encode_weak(&grid);
    // r1c5 shaded is already known; r2c5 must then be unshaded.
    let established = vec![weak.cell_lit("r1c5".parse().unwrap(), false)];
    let goal = weak.cell_lit("r2c5".parse().unwrap(), true);
    let WeakProofOutcome::Proof(proof) = derive_weak_proof(&weak, &established, goal) else {
        panic!("r2c5 follows by propagation");
    };
    println!("{}", proof.pretty());
    println!("size {}", proof_size(&proof));
    let reparsed = parse_proof(&proof.serialize()).unwrap();
    let mut assumptions = established.clone();
    assumptions.push(!goal);
    let root = check_proof(&reparsed, &weak, &assumptions).unwrap();
    println!("checks, concluding {root}");
}
