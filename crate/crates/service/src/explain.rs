//! Few-shot prompts for staged steps and template explanations that need no model.

use std::borrow::Cow;

use hitori_core::connectivity::{render_picture, PictureProof, PictureVerdict};
use hitori_core::grid::{CellRef, CellStatus, ShadingState};
use hitori_core::proof::{CellLit, ProofNode};
use hitori_core::staging::{ClauseReason, StepRecord, Technique};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{ChatClient, EndpointConfig, EndpointError};

/// The full prompt: three worked demonstrations followed by the slot for the current step.
pub const PROMPT_TEMPLATE: &str = include_str!("prompt_template.txt");

const STEP_MARKER: &str = "Now, look at the following step";

/// The three worked demonstrations, up to the blank line before the current step.
pub fn demonstrations() -> &'static str {
    let at = PROMPT_TEMPLATE
        .find(STEP_MARKER)
        .expect("template has a step section");
    &PROMPT_TEMPLATE[..at]
}

fn step_template() -> &'static str {
    &PROMPT_TEMPLATE[demonstrations().len()..]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistoryMode {
    /// Every cell decided before the step.
    Full,
    /// Only decided cells that the step's proof mentions.
    #[default]
    Filtered,
}

impl std::str::FromStr for HistoryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(HistoryMode::Full),
            "filtered" => Ok(HistoryMode::Filtered),
            other => Err(format!(
                "unknown history mode {other:?} (expected full or filtered)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PromptConfig {
    pub history: HistoryMode,
    pub demonstrations: Cow<'static, str>,
    pub endpoint: Option<EndpointConfig>,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            history: HistoryMode::default(),
            demonstrations: Cow::Borrowed(demonstrations()),
            endpoint: None,
        }
    }
}

impl PromptConfig {
    pub fn with_history(history: HistoryMode) -> Self {
        PromptConfig {
            history,
            ..PromptConfig::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplainError {
    #[error("step {0} is argued by connectivity; use the picture prompt")]
    WrongTechnique(usize),
    #[error(transparent)]
    Endpoint(#[from] EndpointError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Llm { model: String, endpoint: String },
    Template,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Explanation {
    pub step_index: usize,
    pub text: String,
    pub provenance: Provenance,
    /// The prompt this explanation answers, kept for audit.
    pub prompt_echo: String,
}

fn decided_cells(state: &ShadingState, status: CellStatus) -> Vec<CellRef> {
    let mut cells = state.cells_with(status);
    cells.sort_unstable();
    cells
}

/// Cells decided before the step that the prompt reports, by status.
fn history(step: &StepRecord, mode: HistoryMode) -> (Vec<CellRef>, Vec<CellRef>) {
    let relevant = step_cells(step);
    let keep = |cells: Vec<CellRef>| -> Vec<CellRef> {
        match mode {
            HistoryMode::Full => cells,
            HistoryMode::Filtered => cells.into_iter().filter(|c| relevant.contains(c)).collect(),
        }
    };
    (
        keep(decided_cells(&step.before, CellStatus::Shaded)),
        keep(decided_cells(&step.before, CellStatus::Unshaded)),
    )
}

/// Cells named by the step's proof or picture, including its conclusion.
pub fn step_cells(step: &StepRecord) -> Vec<CellRef> {
    let mut cells = match &step.technique {
        Technique::WeakProof { proof, .. } => proof.cells(),
        Technique::Picture(p) => {
            let mut cells = vec![p.assumed];
            cells.extend(p.articulation_points.iter().copied());
            if let PictureVerdict::ArticulationUnsat { refutation, .. } = &p.verdict {
                cells.extend(refutation.cells());
            }
            cells
        }
    };
    cells.push(step.subgoal.cell);
    cells.sort_unstable();
    cells.dedup();
    cells
}

fn quoted_list(cells: &[CellRef]) -> String {
    cells
        .iter()
        .map(|c| format!("`{c}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn history_message(cells: &[CellRef], word: &str) -> String {
    match cells.len() {
        0 => String::new(),
        1 => format!(
            "Before this step, the cell {} was {word}.",
            quoted_list(cells)
        ),
        _ => format!(
            "Before this step, the cells {} were {word}.",
            quoted_list(cells)
        ),
    }
}

/// The shaded and unshaded history lines for the prompt.
fn history_messages(step: &StepRecord, mode: HistoryMode) -> (String, String) {
    let (shaded, unshaded) = history(step, mode);
    if shaded.is_empty() && unshaded.is_empty() {
        let nothing = step
            .before
            .statuses()
            .iter()
            .all(|&s| s == CellStatus::Unknown);
        let line = if nothing || mode == HistoryMode::Full {
            "Before this step, no cells were decided yet."
        } else {
            "Before this step, none of the cells in this proof were decided yet."
        };
        return (line.to_string(), String::new());
    }
    (
        history_message(&shaded, "shaded"),
        history_message(&unshaded, "unshaded"),
    )
}

fn value_phrase(shaded: bool) -> &'static str {
    if shaded {
        "shaded"
    } else {
        "left unshaded"
    }
}

/// The "Reasons for the clauses in the proof" block, in order of first appearance.
pub fn solver_explanation(reasons: &[ClauseReason]) -> String {
    let mut out = String::from("Reasons for the clauses in the proof");
    for r in reasons {
        out.push_str(&format!("\n    {}: {}", r.clause, r.reason));
    }
    out
}

/// Fills the prompt template for a weak-proof step. Pure: equal inputs give equal bytes.
pub fn build_prompt(step: &StepRecord, cfg: &PromptConfig) -> Result<String, ExplainError> {
    let Technique::WeakProof { proof, .. } = &step.technique else {
        return Err(ExplainError::WrongTechnique(step.index));
    };
    let (shaded_msg, unshaded_msg) = history_messages(step, cfg.history);
    let body = step_template()
        .replace("{z3}", &proof.pretty())
        .replace("{solver_explanation}", &solver_explanation(&step.reasons))
        .replace("{shaded_cells_message}", &shaded_msg)
        .replace("{unshaded_cells_message}", &unshaded_msg)
        .replace("{target}", &step.subgoal.cell.to_string())
        .replace("{value}", value_phrase(step.subgoal.shaded));
    Ok(format!("{}{body}", cfg.demonstrations))
}

/// Prompt for a connectivity step: the picture, its legend, and the same history lines.
pub fn build_picture_prompt(step: &StepRecord, cfg: &PromptConfig) -> Result<String, ExplainError> {
    let Technique::Picture(p) = &step.technique else {
        return Err(ExplainError::WrongTechnique(step.index));
    };
    let (shaded_msg, unshaded_msg) = history_messages(step, cfg.history);
    let mut out = String::new();
    out.push_str("Look at the following step in the solution of a Hitori puzzle. ");
    out.push_str("It is argued from connectivity rather than from a resolution proof.\n\n");
    out.push_str("```text\n");
    out.push_str(&step.display_text());
    out.push_str("\n```\n\n");
    out.push_str(
        "In the grid, `X` marks cells shaded before this step, `x` marks cells that would have \
         to be shaded under the assumption, and `.` and `-` mark unshaded cells in different \
         connected regions.\n\n",
    );
    if !step.reasons.is_empty() {
        out.push_str("We obtain the meaning of the clauses as follows:\n\n```text\n");
        out.push_str(&solver_explanation(&step.reasons));
        out.push_str("\n```\n\n");
    }
    out.push_str(&format!("{shaded_msg}\n{unshaded_msg}\n\n"));
    out.push_str(&format!(
        "After this step, the cell `{}` was {}.\n\n",
        p.assumed,
        value_phrase(step.subgoal.shaded)
    ));
    out.push_str("Prepare an explanation for this step that would be understandable to a human.\n");
    Ok(out)
}

/// Whichever prompt fits the step's technique.
pub fn prompt_for(step: &StepRecord, cfg: &PromptConfig) -> String {
    match step.technique {
        Technique::WeakProof { .. } => build_prompt(step, cfg),
        Technique::Picture(_) => build_picture_prompt(step, cfg),
    }
    .expect("technique matches the prompt kind")
}

fn join_names(cells: &[CellRef]) -> String {
    let names: Vec<String> = cells.iter().map(CellRef::to_string).collect();
    match names.as_slice() {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn known(cells: &[CellRef], word: &str) -> String {
    let verb = if cells.len() == 1 { "is" } else { "are" };
    format!("{} {verb} already {word}", join_names(cells))
}

fn sentence(text: &str) -> String {
    let text = text.trim_end_matches('.');
    format!("{text}.")
}

fn weak_text(step: &StepRecord, proof: &ProofNode) -> String {
    let target = step.subgoal.cell;
    let value = step.subgoal.value_word();
    let goal = CellLit::new(target, !step.subgoal.shaded);
    let leaves = proof.leaves();
    let units: Vec<CellLit> = leaves.iter().filter_map(|c| c.as_unit()).collect();
    let mut facts_shaded: Vec<CellRef> = Vec::new();
    let mut facts_unshaded: Vec<CellRef> = Vec::new();
    for u in &units {
        let status = step.before.get(u.cell);
        let holds = match status {
            CellStatus::Shaded => !u.clear,
            CellStatus::Unshaded => u.clear,
            CellStatus::Unknown => false,
        };
        if !holds {
            continue;
        }
        let bucket = if u.clear {
            &mut facts_unshaded
        } else {
            &mut facts_shaded
        };
        if !bucket.contains(&u.cell) {
            bucket.push(u.cell);
        }
    }
    let mut parts: Vec<String> = step.reasons.iter().map(|r| sentence(&r.reason)).collect();
    let mut facts: Vec<String> = Vec::new();
    if !facts_shaded.is_empty() {
        facts.push(known(&facts_shaded, "shaded"));
    }
    if !facts_unshaded.is_empty() {
        facts.push(known(&facts_unshaded, "unshaded"));
    }
    let by_contradiction = units.contains(&goal.negated());
    let conclusion = if by_contradiction {
        let opposite = if step.subgoal.shaded {
            "unshaded"
        } else {
            "shaded"
        };
        format!("if {target} were {opposite} these facts would contradict each other, so {target} is {value}.")
    } else {
        format!("so {target} is {value}.")
    };
    if facts.is_empty() {
        let mut c = conclusion;
        c[..1].make_ascii_uppercase();
        parts.push(c);
    } else {
        parts.push(format!("{}, {conclusion}", facts.join(" and ")));
    }
    parts.join(" ")
}

fn picture_text(step: &StepRecord, p: &PictureProof) -> String {
    let assumed = p.assumed;
    let (word, value) = if p.assumed_shaded {
        ("shaded", "unshaded")
    } else {
        ("unshaded", "shaded")
    };
    let mut out = format!("Suppose {assumed} is {word}. ");
    if !p.forced_shaded.is_empty() {
        out.push_str("Then the cells marked x would have to be shaded as well. ");
    }
    match &p.verdict {
        PictureVerdict::Disconnected => {
            out.push_str(
                "The cells that must stay unshaded would then fall into separate regions \
                 (marked . and -), so the unshaded cells could not all be connected. ",
            );
        }
        PictureVerdict::ArticulationUnsat { .. } => {
            let points = &p.articulation_points;
            if !points.is_empty() {
                let verb = if points.len() == 1 {
                    "would cut"
                } else {
                    "would each cut"
                };
                out.push_str(&format!(
                    "Shading {} {verb} the unshaded region apart, so {} must stay unshaded. ",
                    join_names(points),
                    if points.len() == 1 { "it" } else { "they" }
                ));
            }
            let reasons: Vec<String> = step.reasons.iter().map(|r| sentence(&r.reason)).collect();
            if reasons.is_empty() {
                out.push_str("That leaves the rules unable to hold together. ");
            } else {
                out.push_str("That leaves the rules unable to hold together: ");
                out.push_str(&reasons.join(" "));
                out.push(' ');
            }
        }
    }
    out.push_str(&format!(
        "Connectedness lost if {assumed} is {word}, so {assumed} is {value}.\nASCII grid:\n{}",
        render_picture(p)
    ));
    out
}

/// Deterministic English rendering of the step, built from its clause reasons or picture.
pub fn template_text(step: &StepRecord) -> String {
    match &step.technique {
        Technique::WeakProof { proof, .. } => weak_text(step, proof),
        Technique::Picture(p) => picture_text(step, p),
    }
}

/// Explanation from the template, with no network use.
pub fn explain_offline(step: &StepRecord, history: HistoryMode) -> Explanation {
    let cfg = PromptConfig::with_history(history);
    Explanation {
        step_index: step.index,
        text: template_text(step),
        provenance: Provenance::Template,
        prompt_echo: prompt_for(step, &cfg),
    }
}

/// Produces explanations, asking a chat endpoint when one is configured.
#[derive(Clone, Debug, Default)]
pub struct Explainer {
    client: Option<ChatClient>,
}

impl Explainer {
    pub fn offline() -> Self {
        Explainer { client: None }
    }

    pub fn new(endpoint: Option<EndpointConfig>) -> Self {
        Explainer {
            client: endpoint.map(ChatClient::new),
        }
    }

    pub fn from_env() -> Self {
        Explainer::new(EndpointConfig::from_env())
    }

    pub fn has_endpoint(&self) -> bool {
        self.client.is_some()
    }

    /// The model's answer when an endpoint is configured and `offline` is false, the template
    /// otherwise. Endpoint failures are returned so the caller can decide on a fallback.
    pub async fn explain_step(
        &self,
        step: &StepRecord,
        history: HistoryMode,
        offline: bool,
    ) -> Result<Explanation, ExplainError> {
        let client = match &self.client {
            Some(c) if !offline => c,
            _ => return Ok(explain_offline(step, history)),
        };
        let cfg = PromptConfig {
            history,
            endpoint: Some(client.config().clone()),
            ..PromptConfig::default()
        };
        let prompt = prompt_for(step, &cfg);
        let text = client.complete(&prompt).await?;
        Ok(Explanation {
            step_index: step.index,
            text,
            provenance: Provenance::Llm {
                model: client.config().model.clone(),
                endpoint: client.config().base_url.clone(),
            },
            prompt_echo: prompt,
        })
    }
}
