//! A connectivity picture: shading r2c1 after the first ten published steps splits the board.

use hitori_core::connectivity::{picture_proof, render_picture};
use hitori_core::grid::parse_puzzle;
use hitori_core::staging::{stage, StageContext};

fn main() {
    let grid = parse_puzzle("5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2").unwrap();
    let plan = stage(&grid).unwrap();
    let ctx = StageContext::at_step(&plan, 10).unwrap();
    let goal = ctx.subgoal("r2c1".parse().unwrap()).lit(&ctx.weak);
    let picture = picture_proof(&grid, &ctx.weak, &ctx.established, goal).unwrap();
    println!("{:?}", picture.verdict);
    println!("{}", render_picture(&picture));
}
