//! `vecopt` command line: `solve`, `bench` and `export`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub mod bench;
pub mod export;
pub mod solve;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },
    #[error("{format} export needs q = {supported}, report has q = {q}")]
    DimensionUnsupported { format: &'static str, q: usize, supported: usize },
    #[error(transparent)]
    Core(#[from] vecopt::Error),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::File { .. } => EXIT_NO_INPUT,
            CliError::Core(vecopt::Error::InvalidConfig(_) | vecopt::Error::UnknownName(_)) => EXIT_USAGE,
            _ => EXIT_ERROR,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::File { path: path.to_path_buf(), source })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::File { path: path.to_path_buf(), source })
}

#[derive(Debug, Parser)]
#[command(name = "vecopt", version, about = "Polyhedral approximation of upper images of convex vector optimization problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate the upper image of one problem.
    Solve(solve::SolveArgs),
    /// Run a benchmark table and write one CSV row per run.
    Bench(bench::BenchArgs),
    /// Render a saved report as SVG (q = 2) or OFF (q = 3).
    Export(export::ExportArgs),
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve::cmd_solve(&args),
        Command::Bench(args) => bench::cmd_bench(&args),
        Command::Export(args) => export::cmd_export(&args).map(|()| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
