//! Stage a puzzle into an explanation plan and print a summary line per step.
//!
//! `cargo run -p hitori-core --example stage [FILE] [--jsonl]`

use hitori_core::grid::parse_puzzle;
use hitori_core::staging::{plan_to_jsonl, stage, Technique};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let jsonl = args.iter().any(|a| a == "--jsonl");
    let text = match args.iter().find(|a| !a.starts_with("--")) {
        Some(path) => std::fs::read_to_string(path).unwrap(),
        None => "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2".to_string(),
    };
    let plan = stage(&parse_puzzle(&text).unwrap()).unwrap();
    if jsonl {
        print!("{}", plan_to_jsonl(&plan));
        return;
    }
    for step in &plan.steps {
        let how = match &step.technique {
            Technique::WeakProof { size, .. } => format!("weak proof, {size} chars"),
            Technique::Picture(p) if p.is_disconnected() => "picture, disconnected".to_string(),
            Technique::Picture(_) => "picture, articulation points".to_string(),
        };
        println!(
            "{:>3}. {} {} ({how})",
            step.index,
            step.subgoal.cell,
            step.subgoal.value_word()
        );
    }
    let t = plan.totals;
    println!(
        "mean {:.1}, max {}, pictures {}",
        t.mean_chars(),
        t.max_chars,
        t.picture_steps
    );
}
