use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use pqrc_expcli::{execute, Command, Result, SweepSpec};

/// Seeded parameter sweeps over probabilistic Clifford+CT reservoirs.
#[derive(Debug, Parser)]
#[command(name = "pqrc", version, about)]
struct Cli {
    /// TOML sweep file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output root; each command writes to a subdirectory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Shrink every grid to a quick end-to-end run.
    #[arg(long, global = true)]
    smoke: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Entanglement, spacing ratios, magic and anti-flatness per point.
    Diagnose,
    /// Memory capacity, NARMA and convergence benchmarks.
    Task,
    /// Anti-flatness size scaling and decay exponents.
    Scaling,
    /// Haar-random reference values.
    HaarRef,
    /// Heuristic crossover locators on a diagnose summary.
    Crossovers {
        /// Diagnose summary; defaults to `<out>/diagnose/summary.csv`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn spec_from(cli: &Cli) -> Result<SweepSpec> {
    let mut spec = match &cli.config {
        Some(path) => SweepSpec::load(path)?,
        None => SweepSpec::default(),
    };
    if cli.smoke {
        spec = spec.smoke();
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        spec.jobs = jobs;
    }
    if let Some(out) = &cli.out {
        spec.out = out.clone();
    }
    if let Cmd::Crossovers { input: Some(input) } = &cli.command {
        spec.crossovers.input = Some(input.clone());
    }
    Ok(spec)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let cmd = match cli.command {
        Cmd::Diagnose => Command::Diagnose,
        Cmd::Task => Command::Task,
        Cmd::Scaling => Command::Scaling,
        Cmd::HaarRef => Command::HaarRef,
        Cmd::Crossovers { .. } => Command::Crossovers,
    };
    let result = spec_from(&cli).and_then(|spec| execute(cmd, &spec));
    match result {
        Ok(files) => {
            for f in files {
                println!("{} ({} rows)", f.path.display(), f.rows);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            ExitCode::FAILURE
        }
    }
}
