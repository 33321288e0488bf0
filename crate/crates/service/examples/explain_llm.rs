//! Ask a chat-completion endpoint to explain a step.
//!
//! Needs EXPLAINER_API_BASE (and usually EXPLAINER_MODEL, EXPLAINER_API_KEY). Without it the
//! template explanation is printed instead.

use hitori_core::grid::parse_puzzle;
use hitori_core::staging::stage;
use hitori_service::explain::{explain_offline, Explainer, HistoryMode};

#[tokio::main]
async fn main() {
    let k: usize = std::env::args().nth(1).map_or(16, |s| s.parse().unwrap());
    let grid = parse_puzzle("5 1 3 2 3\n1 3 2 4 3\n4 5 2 3 2\n2 3 5 4 1\n4 2 3 1 2").unwrap();
    let plan = stage(&grid).unwrap();
    let step = &plan.steps[k - 1];
    let explainer = Explainer::from_env();
    let e = match explainer
        .explain_step(step, HistoryMode::Filtered, false)
        .await
    {
        Ok(e) => e,
        Err(err) => {
            eprintln!("{err}");
            explain_offline(step, HistoryMode::Filtered)
        }
    };
    println!("{:?}\n{}", e.provenance, e.text);
}
