use clap::Parser;
use hitori_service::cli::{run, Cli};

fn main() -> std::process::ExitCode {
    run(Cli::parse())
}
