mod args;
mod commands;
mod error;
mod output;
mod settings;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, EXIT_USAGE};
use crate::settings::{resolve, Settings};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let threads = resolve(cli.threads, &settings, "threads", 0usize)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => commands::generate::run(a, &settings),
        Command::Embed(a) => commands::embed::run(a, &settings),
        Command::Eval(a) => commands::eval::run(a, &settings),
        Command::Bench(a) => commands::bench::run(a, &settings),
        Command::Landmark(a) => commands::landmark::run(a, &settings),
    }
}
