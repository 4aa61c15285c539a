//! `epp`: edge plasmon-polariton dispersion, spectral index, field profiles and asymptotics.
//!
//! Exit status: 0 on success, 1 on numerical failure (or a failed validation check), 2 on bad input.

mod commands;
mod config;
mod output;
mod validate;

use clap::{Parser, Subcommand};
use commands::{Outcome, RunOptions};
use config::ConfigError;
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "epp",
    version,
    about = "Edge plasmon-polaritons on anisotropic 2D sheets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print warnings and solver notes to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    /// Record wall-clock time per solve (output is then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Solve the dispersion relation for each frequency and initial guess.
    Solve,
    /// Solve over a grid of rotation angles and frequencies.
    Sweep,
    /// Winding index and bulk-zero census at given wavenumbers.
    Index,
    /// Potential profile across the edge.
    Field,
    /// Long-wavelength asymptotics of the split functions.
    Asymptote,
    /// Run the built-in consistency checks.
    Validate,
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if cli.jobs == Some(0) {
        return Err(ConfigError("--jobs must be at least 1".into()).into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()?;
    let opts = RunOptions {
        verbose: cli.verbose,
        timing: cli.timing,
    };
    let (rows, ok) = pool.install(|| -> anyhow::Result<_> {
        if let Command::Validate = cli.command {
            return Ok(validate::run());
        }
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| ConfigError("--config is required for this command".into()))?;
        let cfg = config::load(path)?;
        let Outcome { rows, ok } = match cli.command {
            Command::Solve => commands::solve_cmd(&cfg, opts)?,
            Command::Sweep => commands::sweep_cmd(&cfg, opts)?,
            Command::Index => commands::index_cmd(&cfg, opts)?,
            Command::Field => commands::field_cmd(&cfg, opts)?,
            Command::Asymptote => commands::asymptote_cmd(&cfg, opts)?,
            Command::Validate => unreachable!(),
        };
        Ok((rows, ok))
    })?;
    output::write(&rows, cli.format, cli.out.as_deref())?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("epp: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
