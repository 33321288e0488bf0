mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{P63, R2C1_PICTURE};

fn hitori(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitori"))
        .args(args)
        .env_remove("EXPLAINER_API_BASE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_prints_the_unique_solution() {
    let dir = tempfile::tempdir().unwrap();
    let p63 = write(dir.path(), "p63.txt", P63);
    let o = hitori(&["solve", &p63]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "5 1 3 2 #");
    assert!(out.contains("solution is unique"));
}

#[test]
fn solve_non_unique_exits_2_naming_cells() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "two.txt", "1 1\n2 3\n");
    let o = hitori(&["solve", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("r1c1") && err.contains("r1c2"), "{err}");
    let f = write(dir.path(), "none.txt", "1 1\n1 1\n");
    assert_eq!(hitori(&["solve", &f]).status.code(), Some(3));
    let f = write(dir.path(), "ragged.txt", "1 2\n3\n");
    let o = hitori(&["solve", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert_eq!(hitori(&["solve", "/no/such/file"]).status.code(), Some(1));
}

#[test]
fn stage_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let p63 = write(dir.path(), "p63.txt", P63);
    let o = hitori(&["stage", &p63]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().last().unwrap(), "picture steps: 5");
    assert!(out.contains("step 25: r5c1 is shaded"));
    assert!(out.contains(R2C1_PICTURE));
    let o = hitori(&["stage", &p63, "--json"]);
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 25);
    assert_eq!(lines[10]["picture"]["ascii"], R2C1_PICTURE);
}

#[test]
fn step_prints_proof_and_reasons() {
    let dir = tempfile::tempdir().unwrap();
    let p63 = write(dir.path(), "p63.txt", P63);
    let o = hitori(&["step", &p63, "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap(), "c01_04");
    let o = hitori(&["step", &p63, "16"]);
    assert!(stdout(&o).contains("(or c01_05 c02_05): r1c5 and r2c5 cannot both be shaded"));
    assert_eq!(hitori(&["step", &p63, "26"]).status.code(), Some(1));
}

#[test]
fn explain_offline_and_llm_without_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let p63 = write(dir.path(), "p63.txt", P63);
    let o = hitori(&["explain", &p63, "16", "--offline", "--history", "full"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).trim_end(),
        "r1c5 and r2c5 cannot both be shaded because they share an edge. r1c5 is already shaded, so r2c5 is unshaded."
    );
    assert!(stderr(&o).contains("[template]"));
    let o = hitori(&["explain", &p63, "16", "--show-prompt"]);
    assert!(stdout(&o)
        .contains("Prepare an explanation for this step that would be understandable to a human."));
    let o = hitori(&["explain", &p63, "16", "--llm"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        hitori(&["explain", &p63, "16", "--history", "partial"])
            .status
            .code()
            != Some(0)
    );
}

#[test]
fn bench_prints_a_row_per_puzzle() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p63.txt", P63);
    write(dir.path(), "tiny.txt", "1 2\n2 2\n");
    let o = hitori(&["bench", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    let cols: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(&cols[..5], ["puzzle", "size", "avg", "max", "pbp"]);
    let p63: Vec<&str> = lines[1].split_whitespace().collect();
    assert_eq!(&p63[..5], ["p63", "5x5", "128.0", "508", "5"]);
    write(dir.path(), "zbad.txt", "1 1\n1 1\n");
    let o = hitori(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("zbad"));
}
