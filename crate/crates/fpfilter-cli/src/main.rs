//! Command-line front end: run one experiment from a config file, or emit
//! the built-in reference datasets.
//!
//! Exit codes: 0 success, 1 config error, 2 numerical or I/O failure.

mod config;
mod figures;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

#[derive(Debug, Parser)]
#[command(
    name = "fpfilter",
    about = "Velocity filtering of ultra-cold atoms by a barrier-well-barrier laser potential",
    long_about = None
)]
struct Cli {
    /// Run the experiment described by a TOML config file.
    #[arg(long, value_name = "PATH", conflicts_with = "figure")]
    config: Option<PathBuf>,

    /// Emit one of the built-in reference datasets (fig2, fig3, fig4, fig5).
    #[arg(long, value_name = "ID")]
    figure: Option<figures::FigureId>,

    /// Output directory (figures) or base directory for config outputs.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads for the data-parallel parts (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Reserved; every algorithm here is deterministic.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

/// Failures that indicate a bad config rather than a numerical problem.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed;

    #[cfg(feature = "parallel")]
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not set thread count: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some() {
        eprintln!("warning: built without the parallel feature; --threads ignored");
    }

    let result = match (&cli.config, &cli.figure) {
        (Some(path), None) => run::run_config(path, &cli.out),
        (None, Some(figure)) => figures::reproduce(*figure, &cli.out),
        _ => Err(CliError::Config(
            "exactly one of --config or --figure is required".into(),
        )),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Config(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
