//! Template explanations for every step of a plan, no network needed.

use hitori_core::grid::parse_puzzle;
use hitori_core::staging::stage;
use hitori_service::explain::{explain_offline, HistoryMode};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).unwrap(),
        None => "5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2".to_string(),
    };
    let plan = stage(&parse_puzzle(&text).unwrap()).unwrap();
    for step in &plan.steps {
        let e = explain_offline(step, HistoryMode::Filtered);
        println!("Step {}. {}\n", e.step_index, e.text);
    }
}
