use std::process::ExitCode;

use clap::Parser;
use envyline_cli::{exit, run, Cli, CliError, Status};

/// Caps the worker pool from `ENVYLINE_THREADS`.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ENVYLINE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "ENVYLINE_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::PASS
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| run(&cli)) {
        Ok(Status::Pass) => ExitCode::from(exit::PASS),
        Ok(Status::Fail) => ExitCode::from(exit::VERIFICATION_FAILURE),
        Err(e) => {
            eprintln!("envyline: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
