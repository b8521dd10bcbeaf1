use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use kerr_phase::io::Format;

mod commands;
mod config;

use commands::{Run, ValidityError};
use config::{ConfigError, RunConfig};

/// Phase-space simulations of the Kerr oscillator.
#[derive(Debug, Parser)]
#[command(name = "kerr-phase", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Treat edge-mass warnings and non-finite values as errors.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Binary,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Wigner snapshots with negativity and spectral summaries.
    Evolve,
    /// Ring traces and ring probabilities.
    Ring,
    /// Total, classical and quantum currents, vorticity and stagnation points.
    Current,
    /// Shear-polarization series and detected revivals.
    Shear,
    /// Liouville-evolved classical twin and its shear measure.
    Classical,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Ring => "ring",
            Command::Current => "current",
            Command::Shear => "shear",
            Command::Classical => "classical",
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| ConfigError("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    cfg.strict |= cli.strict;
    if let Some(f) = cli.format {
        cfg.output.format = Some(match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Binary => Format::Binary,
        });
    }
    let out = cli
        .out
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build()?;
    let run = Run::new(cfg, out, cli.command.name());
    pool.install(|| match cli.command {
        Command::Evolve => run.evolve(),
        Command::Ring => run.ring(),
        Command::Current => run.current(),
        Command::Shear => run.shear(),
        Command::Classical => run.classical(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else if e.downcast_ref::<ValidityError>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
