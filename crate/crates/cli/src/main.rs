use std::process::ExitCode;

use clap::Parser;
use nps_cli::{execute, init_logging, Cli, Outcome};

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::RecoveryFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
