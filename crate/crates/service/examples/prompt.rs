//! Print the few-shot prompt for one step of the 5x5 example.
//!
//! `cargo run -p hitori-service --example prompt [STEP] [full|filtered]`

use hitori_core::grid::parse_puzzle;
use hitori_core::staging::stage;
use hitori_service::explain::{prompt_for, HistoryMode, PromptConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map_or(16, |s| s.parse().unwrap());
    let mode: HistoryMode = args
        .next()
        .map_or(HistoryMode::Filtered, |s| s.parse().unwrap());
    let grid = parse_puzzle("5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2").unwrap();
    let plan = stage(&grid).unwrap();
    print!(
        "{}",
        prompt_for(&plan.steps[k - 1], &PromptConfig::with_history(mode))
    );
}
