//! Seeded sweep orchestration for the reservoir simulator: grid expansion,
//! realization-level parallelism, CSV emission with declared schemas and the
//! heuristic crossover locators.

pub mod agg;
pub mod config;
pub mod crossovers;
pub mod diagnose;
pub mod error;
pub mod haar_ref;
pub mod meta;
pub mod runner;
pub mod scaling;
pub mod table;
pub mod task;

use std::path::PathBuf;
use std::time::Instant;

use log::info;

pub use config::SweepSpec;
pub use error::{CliError, Result};
use meta::{write_meta, OutputFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Diagnose,
    Task,
    Scaling,
    HaarRef,
    Crossovers,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Diagnose => "diagnose",
            Command::Task => "task",
            Command::Scaling => "scaling",
            Command::HaarRef => "haar-ref",
            Command::Crossovers => "crossovers",
        }
    }

    /// Output subdirectory under `--out`.
    pub fn dir(self) -> &'static str {
        match self {
            Command::HaarRef => "haar",
            c => c.name(),
        }
    }
}

/// `0` means one worker per available core.
pub fn resolve_jobs(jobs: usize) -> usize {
    if jobs > 0 {
        jobs
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

/// Runs one subcommand and writes its tables plus `meta.json` to
/// `<out>/<command>/`. Returns the written files.
pub fn execute(cmd: Command, spec: &SweepSpec) -> Result<Vec<OutputFile>> {
    spec.validate()?;
    let jobs = resolve_jobs(spec.jobs);
    let dir: PathBuf = spec.out.join(cmd.dir());
    let start = Instant::now();
    info!("{} -> {}", cmd.name(), dir.display());
    let outputs = match cmd {
        Command::Diagnose => diagnose::run(spec, jobs)?.write(&dir)?,
        Command::Task => task::run(spec, jobs)?.write(&dir)?,
        Command::Scaling => scaling::run(spec, jobs)?.write(&dir)?,
        Command::HaarRef => haar_ref::run(spec, jobs)?.write(&dir)?,
        Command::Crossovers => crossovers::run(&spec.crossover_input())?.write(&dir)?,
    };
    write_meta(&dir, cmd.name(), spec, jobs, &outputs, start.elapsed())?;
    Ok(outputs)
}
