use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod json;

use config::RunConfig;

/// Kolakoski sequences with even run lengths: derived substitutions,
/// pure point tests, model sets, diffraction and pictures.
#[derive(Debug, Parser)]
#[command(name = "kolakoski", version, about)]
struct Cli {
    /// Read the run configuration from a JSON file (or a previous output).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<RunConfig>,
}

/// A bad argument or input file; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match (cli.config, cli.command) {
        (Some(path), None) => config::load(&path)?,
        (None, Some(command)) => command,
        (Some(_), Some(_)) => return Err(usage("give either --config or a subcommand, not both")),
        (None, None) => return Err(usage("no subcommand given; try --help")),
    };
    let out = commands::execute(&config)?;
    match config.output() {
        Some(path) => fs::write(path, out).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display())),
        None => {
            io::stdout().lock().write_all(out.as_bytes())?;
            Ok(())
        }
    }
}

/// 2 for anything the caller can fix by changing the input, 1 otherwise.
fn exit_code(e: &anyhow::Error) -> u8 {
    use kolakoski::Error as E;
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::Inconsistent(_) | E::Unstable(_) | E::NoReturn(_) => 1,
                _ => 2,
            };
        }
    }
    1
}
