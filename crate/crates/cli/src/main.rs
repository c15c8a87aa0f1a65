use std::process::ExitCode;

use cgeom_cli::{parse_workers, run, Cli, WORKERS_VAR};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = parse_workers(std::env::var(WORKERS_VAR).ok().as_deref()).and_then(|w| run(cli.command, w));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code() as u8)
        }
    }
}
