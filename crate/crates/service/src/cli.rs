//! The `hitori` command line.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hitori_core::grid::{parse_puzzle, render_state, Grid};
use hitori_core::staging::{plan_to_jsonl, solve_unique, stage, StagingError, StagingPlan};

use crate::api::{serve, AppState};
use crate::explain::{
    explain_offline, prompt_for, Explainer, HistoryMode, PromptConfig, Provenance,
};
use crate::llm::EndpointConfig;

#[derive(Debug, Parser)]
#[command(
    name = "hitori",
    about = "Solve Hitori puzzles and explain each step",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the unique solution, or the cells where two solutions differ.
    Solve { file: PathBuf },
    /// Print every step of the staged plan.
    Stage {
        file: PathBuf,
        /// One JSON object per step instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print one step (1-based) with its clause reasons.
    Step { file: PathBuf, n: usize },
    /// Explain one step (1-based).
    Explain {
        file: PathBuf,
        n: usize,
        /// Use the template explanation, never the endpoint.
        #[arg(long, conflicts_with = "llm")]
        offline: bool,
        /// Require the chat endpoint from EXPLAINER_API_BASE; fail instead of falling back.
        #[arg(long)]
        llm: bool,
        #[arg(long, default_value = "filtered")]
        history: HistoryMode,
        /// Print the prompt before the explanation.
        #[arg(long)]
        show_prompt: bool,
    },
    /// Stage every puzzle file in a directory and print size statistics.
    Bench { dir: PathBuf },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory served under `/`; defaults to web-ui/dist when it exists.
        #[arg(long = "static", env = "HITORI_STATIC_DIR")]
        static_dir: Option<PathBuf>,
    },
}

/// A failure with its exit status: 2 for several solutions, 3 for none, 4 for staging
/// failures, 5 for endpoint failures, 1 for everything else.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<StagingError> for Failure {
    fn from(e: StagingError) -> Self {
        let code = match e {
            StagingError::NonUniqueSolution { .. } => 2,
            StagingError::NoSolution => 3,
            StagingError::StrongProofRequired(_) | StagingError::NonUnitUnsat(_) => 4,
            StagingError::IndexOutOfRange { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_grid(path: &Path) -> Result<Grid, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::other(format!("{}: {e}", path.display())))?;
    parse_puzzle(&text).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

fn staged(path: &Path) -> Result<StagingPlan, Failure> {
    Ok(stage(&read_grid(path)?)?)
}

fn step_of(plan: &StagingPlan, n: usize) -> Result<&hitori_core::staging::StepRecord, Failure> {
    if n == 0 || n > plan.steps.len() {
        return Err(StagingError::IndexOutOfRange {
            index: n,
            len: plan.steps.len(),
        }
        .into());
    }
    Ok(&plan.steps[n - 1])
}

pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { file } => {
            let grid = read_grid(&file)?;
            let solution = solve_unique(&grid)?;
            println!(
                "{}",
                render_state(&grid, &solution).map_err(|e| Failure::other(e.to_string()))?
            );
            println!("solution is unique");
        }
        Command::Stage { file, json } => {
            let plan = staged(&file)?;
            if json {
                print!("{}", plan_to_jsonl(&plan));
            } else {
                for step in &plan.steps {
                    println!(
                        "step {}: {} is {} ({})",
                        step.index,
                        step.subgoal.cell,
                        step.subgoal.value_word(),
                        if step.technique.is_picture() {
                            "picture"
                        } else {
                            "weak proof"
                        }
                    );
                    println!("{}\n", step.display_text());
                }
                println!(
                    "steps: {}, mean proof size: {:.1}, max proof size: {}",
                    plan.steps.len(),
                    plan.totals.mean_chars(),
                    plan.totals.max_chars
                );
                println!("picture steps: {}", plan.totals.picture_steps);
            }
        }
        Command::Step { file, n } => {
            let plan = staged(&file)?;
            let step = step_of(&plan, n)?;
            println!("{}", step.display_text());
            for r in &step.reasons {
                println!("  {}: {}", r.clause, r.reason);
            }
        }
        Command::Explain {
            file,
            n,
            offline,
            llm,
            history,
            show_prompt,
        } => {
            let plan = staged(&file)?;
            let step = step_of(&plan, n)?;
            if show_prompt {
                println!(
                    "{}\n",
                    prompt_for(step, &PromptConfig::with_history(history))
                );
            }
            let endpoint = EndpointConfig::from_env();
            if llm && endpoint.is_none() {
                return Err(Failure::other("--llm needs EXPLAINER_API_BASE to be set"));
            }
            let explainer = Explainer::new(endpoint);
            let runtime =
                tokio::runtime::Runtime::new().map_err(|e| Failure::other(e.to_string()))?;
            let explanation = match runtime.block_on(explainer.explain_step(step, history, offline))
            {
                Ok(e) => e,
                Err(e) if llm => {
                    return Err(Failure {
                        code: 5,
                        message: e.to_string(),
                    })
                }
                Err(e) => {
                    eprintln!("warning: {e}; using the template explanation");
                    explain_offline(step, history)
                }
            };
            match &explanation.provenance {
                Provenance::Template => eprintln!("[template]"),
                Provenance::Llm { model, endpoint } => eprintln!("[{model} at {endpoint}]"),
            }
            println!("{}", explanation.text);
        }
        Command::Bench { dir } => bench(&dir)?,
        Command::Serve {
            port,
            host,
            static_dir,
        } => {
            let static_dir = static_dir.or_else(|| {
                let d = PathBuf::from("web-ui/dist");
                d.is_dir().then_some(d)
            });
            let runtime =
                tokio::runtime::Runtime::new().map_err(|e| Failure::other(e.to_string()))?;
            let state = AppState::new(Explainer::from_env());
            runtime
                .block_on(serve(SocketAddr::new(host, port), state, static_dir))
                .map_err(|e| Failure::other(e.to_string()))?;
        }
    }
    Ok(())
}

fn bench(dir: &Path) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Failure::other(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    println!(
        "{:<16} {:>7} {:>8} {:>6} {:>4} {:>9}",
        "puzzle", "size", "avg", "max", "pbp", "time (s)"
    );
    let mut failed = 0;
    for path in &files {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let start = Instant::now();
        match read_grid(path).and_then(|g| Ok((stage(&g)?, g))) {
            Ok((plan, grid)) => println!(
                "{:<16} {:>7} {:>8.1} {:>6} {:>4} {:>9.2}",
                name,
                format!("{}x{}", grid.rows(), grid.cols()),
                plan.totals.mean_chars(),
                plan.totals.max_chars,
                plan.totals.picture_steps,
                start.elapsed().as_secs_f64()
            ),
            Err(f) => {
                failed += 1;
                println!("{name:<16} error: {}", f.message);
            }
        }
    }
    if failed > 0 {
        return Err(Failure::other(format!(
            "{failed} of {} puzzles failed",
            files.len()
        )));
    }
    Ok(())
}
