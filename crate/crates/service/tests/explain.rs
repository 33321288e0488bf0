mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use common::{mock_endpoint, p63_plan, R2C1_PICTURE, TEMPLATE_FIXTURE};
use hitori_core::generate::generate;
use hitori_core::grid::CellRef;
use hitori_core::staging::{stage, StagingPlan, StepRecord, Technique};
use hitori_service::explain::{
    build_picture_prompt, build_prompt, demonstrations, explain_offline, step_cells, template_text,
    ExplainError, Explainer, HistoryMode, PromptConfig, Provenance,
};
use hitori_service::llm::EndpointConfig;
use regex::Regex;

const PLACEHOLDERS: &[&str] = &[
    "z3",
    "solver_explanation",
    "shaded_cells_message",
    "unshaded_cells_message",
    "target",
    "value",
];

/// The fixture with each placeholder turned into a named capture and everything else literal.
fn template_regex() -> Regex {
    let mut pattern = String::from("^");
    let mut rest = TEMPLATE_FIXTURE;
    while let Some(open) = rest.find('{') {
        let close = rest[open..].find('}').unwrap() + open;
        let name = &rest[open + 1..close];
        assert!(PLACEHOLDERS.contains(&name), "unknown placeholder {name}");
        pattern.push_str(&regex::escape(&rest[..open]));
        pattern.push_str(&format!("(?P<{name}>(?s:.*?))"));
        rest = &rest[close + 1..];
    }
    pattern.push_str(&regex::escape(rest));
    pattern.push('$');
    Regex::new(&pattern).unwrap()
}

fn step(name: &str) -> &'static StepRecord {
    p63_plan()
        .steps
        .iter()
        .find(|s| s.subgoal.cell.to_string() == name)
        .unwrap()
}

fn mentioned(text: &str) -> BTreeSet<CellRef> {
    Regex::new(r"r[0-9]+c[0-9]+")
        .unwrap()
        .find_iter(text)
        .map(|m| m.as_str().parse().unwrap())
        .collect()
}

/// Cells the step's proof or picture names, plus those its clause reasons talk about.
fn allowed(step: &StepRecord) -> BTreeSet<CellRef> {
    let mut cells: BTreeSet<CellRef> = step_cells(step).into_iter().collect();
    for r in &step.reasons {
        cells.extend(mentioned(&r.reason));
    }
    cells
}

fn step_section(prompt: &str) -> &str {
    prompt.strip_prefix(demonstrations()).unwrap_or(prompt)
}

#[test]
fn prompt_reproduces_template_around_placeholders() {
    let s = step("r2c5");
    let prompt = build_prompt(s, &PromptConfig::default()).unwrap();
    let caps = template_regex()
        .captures(&prompt)
        .expect("prompt matches the template");
    let Technique::WeakProof { proof, .. } = &s.technique else {
        unreachable!()
    };
    assert_eq!(&caps["z3"], proof.pretty());
    assert_eq!(
        &caps["solver_explanation"],
        "Reasons for the clauses in the proof\n    (or c01_05 c02_05): r1c5 and r2c5 cannot both be shaded because they share an edge"
    );
    assert_eq!(
        &caps["shaded_cells_message"],
        "Before this step, the cell `r1c5` was shaded."
    );
    assert_eq!(&caps["unshaded_cells_message"], "");
    assert_eq!(&caps["target"], "r2c5");
    assert_eq!(&caps["value"], "left unshaded");
    assert!(prompt.contains(
        "r1c5 and r2c5 share an edge. Hence, they cannot both be shaded. Since r1c5 is already shaded, r2c5 is left unshaded. "
    ));
}

#[test]
fn every_weak_step_fills_the_template() {
    let re = template_regex();
    for s in &p63_plan().steps {
        if s.technique.is_picture() {
            continue;
        }
        for mode in [HistoryMode::Full, HistoryMode::Filtered] {
            let prompt = build_prompt(s, &PromptConfig::with_history(mode)).unwrap();
            assert!(re.is_match(&prompt), "step {}", s.index);
        }
    }
}

#[test]
fn prompt_is_deterministic() {
    let s = step("r2c3");
    for mode in [HistoryMode::Full, HistoryMode::Filtered] {
        let cfg = PromptConfig::with_history(mode);
        assert_eq!(
            build_prompt(s, &cfg).unwrap(),
            build_prompt(s, &cfg).unwrap()
        );
    }
}

#[test]
fn history_modes_differ_only_in_history() {
    let re = template_regex();
    let s = step("r2c3");
    let full = build_prompt(s, &PromptConfig::with_history(HistoryMode::Full)).unwrap();
    let filtered = build_prompt(s, &PromptConfig::with_history(HistoryMode::Filtered)).unwrap();
    assert_ne!(full, filtered);
    let (a, b) = (re.captures(&full).unwrap(), re.captures(&filtered).unwrap());
    for name in ["z3", "solver_explanation", "target", "value"] {
        assert_eq!(&a[name], &b[name], "{name}");
    }
    assert_eq!(
        &a["unshaded_cells_message"],
        "Before this step, the cells `r1c2`, `r1c4`, `r3c2`, `r3c4`, `r4c1`, `r4c5` were unshaded."
    );
}

#[test]
fn first_step_has_no_history() {
    let s = &p63_plan().steps[0];
    for mode in [HistoryMode::Full, HistoryMode::Filtered] {
        let prompt = build_prompt(s, &PromptConfig::with_history(mode)).unwrap();
        assert!(prompt.contains("\nBefore this step, no cells were decided yet.\n"));
    }
}

#[test]
fn picture_steps_need_the_picture_prompt() {
    let s = step("r2c1");
    assert_eq!(
        build_prompt(s, &PromptConfig::default()),
        Err(ExplainError::WrongTechnique(11))
    );
    let prompt = build_picture_prompt(s, &PromptConfig::default()).unwrap();
    assert!(prompt.contains("Connectedness lost if r2c1 is shaded"));
    assert!(prompt.contains(R2C1_PICTURE));
    assert!(prompt.contains("After this step, the cell `r2c1` was left unshaded."));
    assert_eq!(
        build_picture_prompt(step("r2c5"), &PromptConfig::default()),
        Err(ExplainError::WrongTechnique(16))
    );
}

#[test]
fn offline_golden_texts() {
    assert_eq!(
        template_text(step("r2c5")),
        "r1c5 and r2c5 cannot both be shaded because they share an edge. r1c5 is already shaded, so r2c5 is unshaded."
    );
    assert_eq!(
        template_text(step("r1c4")),
        "r1c4 has identical neighbors in its row. So r1c4 is unshaded."
    );
    let r2c1 = template_text(step("r2c1"));
    assert!(r2c1.contains("Connectedness lost if r2c1 is shaded"));
    assert!(r2c1.ends_with(&format!("ASCII grid:\n{R2C1_PICTURE}")));
    let e = explain_offline(step("r2c1"), HistoryMode::Filtered);
    assert_eq!(e.provenance, Provenance::Template);
    assert_eq!(e.step_index, 11);
    assert!(e.prompt_echo.contains(R2C1_PICTURE));
}

fn plans() -> Vec<StagingPlan> {
    let mut out = vec![p63_plan().clone()];
    for (n, seed) in [(4, 1), (6, 2), (7, 3)] {
        out.push(stage(&generate(n, n, seed).unwrap().grid).unwrap());
    }
    out
}

#[test]
fn filtered_prompts_and_offline_texts_stay_on_the_step() {
    for plan in plans() {
        for s in &plan.steps {
            let ok = allowed(s);
            let prompt = hitori_service::explain::prompt_for(s, &PromptConfig::default());
            let extra: Vec<_> = mentioned(step_section(&prompt))
                .difference(&ok)
                .copied()
                .collect();
            assert!(
                extra.is_empty(),
                "step {} prompt mentions {extra:?}",
                s.index
            );
            let text = template_text(s);
            assert!(!text.is_empty());
            let extra: Vec<_> = mentioned(&text).difference(&ok).copied().collect();
            assert!(extra.is_empty(), "step {} text mentions {extra:?}", s.index);
            // History lines in filtered mode name proof cells only.
            let proof_cells: BTreeSet<CellRef> = step_cells(s).into_iter().collect();
            for line in prompt.lines().filter(|l| l.starts_with("Before this step")) {
                if demonstrations().contains(line) {
                    continue;
                }
                assert!(
                    mentioned(line).is_subset(&proof_cells),
                    "step {}: {line}",
                    s.index
                );
            }
        }
    }
}

fn endpoint(base: String) -> EndpointConfig {
    EndpointConfig {
        api_key: Some("test-key".to_string()),
        timeout: Duration::from_secs(5),
        ..EndpointConfig::new(base, "mock-model")
    }
}

#[tokio::test]
async fn endpoint_reply_becomes_the_explanation() {
    let (base, log) = mock_endpoint(200, "Because r1c5 is shaded.").await;
    let explainer = Explainer::new(Some(endpoint(base.clone())));
    let s = step("r2c5");
    let e = explainer
        .explain_step(s, HistoryMode::Filtered, false)
        .await
        .unwrap();
    assert_eq!(e.text, "Because r1c5 is shaded.");
    assert_eq!(
        e.provenance,
        Provenance::Llm {
            model: "mock-model".to_string(),
            endpoint: base
        }
    );
    assert_eq!(
        e.prompt_echo,
        build_prompt(s, &PromptConfig::default()).unwrap()
    );
    assert_eq!(log.hits(), 1);
    let body = log.bodies.lock().unwrap()[0].clone();
    assert_eq!(body["model"], "mock-model");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], e.prompt_echo.as_str());
    assert_eq!(log.auth.lock().unwrap()[0], "Bearer test-key");

    let offline = explainer
        .explain_step(s, HistoryMode::Filtered, true)
        .await
        .unwrap();
    assert_eq!(offline.provenance, Provenance::Template);
    assert_eq!(log.hits(), 1);
}

#[tokio::test]
async fn endpoint_failing_three_times_is_an_error() {
    let (base, log) = mock_endpoint(500, "").await;
    let explainer = Explainer::new(Some(endpoint(base)));
    let err = explainer
        .explain_step(step("r2c5"), HistoryMode::Full, false)
        .await
        .unwrap_err();
    let ExplainError::Endpoint(e) = err else {
        panic!("{err:?}")
    };
    assert_eq!(e.status, Some(500));
    assert!(e.body.contains("mock failure"));
    assert_eq!(log.hits(), 3);
}

#[tokio::test]
async fn unreachable_endpoint_is_an_error_without_status() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let mut cfg = endpoint(format!("http://{addr}"));
    cfg.retries = 0;
    let err = Explainer::new(Some(cfg))
        .explain_step(step("r2c5"), HistoryMode::Full, false)
        .await
        .unwrap_err();
    let ExplainError::Endpoint(e) = err else {
        panic!("{err:?}")
    };
    assert_eq!(e.status, None);
}

#[tokio::test]
async fn no_endpoint_means_template() {
    let e = Explainer::offline()
        .explain_step(step("r2c5"), HistoryMode::Full, false)
        .await
        .unwrap();
    assert_eq!(e.provenance, Provenance::Template);
}
