//! Solve a puzzle and prove the solution unique.
//!
//! `cargo run -p hitori-core --example solve [FILE]`

use hitori_core::grid::{parse_puzzle, render_state};
use hitori_core::staging::solve_unique;

const P63: &str = "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2";

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable puzzle file"),
        None => P63.to_string(),
    };
    let grid = parse_puzzle(&text).expect("valid grid");
    match solve_unique(&grid) {
        Ok(solution) => {
            println!("{}", render_state(&grid, &solution).unwrap());
            let shaded: Vec<String> = solution
                .shaded_cells()
                .iter()
                .map(|c| c.to_string())
                .collect();
            println!("shaded: {}", shaded.join(" "));
        }
        Err(e) => println!("{e}"),
    }
}
