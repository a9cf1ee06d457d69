//! Run metadata and the shared write-then-validate step.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::config::SweepSpec;
use crate::error::Result;
use crate::table::Table;

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    command: &'a str,
    cli_version: &'static str,
    core_version: &'static str,
    seed: u64,
    jobs: usize,
    config: &'a SweepSpec,
    outputs: &'a [OutputFile],
    timings: Timings,
}

#[derive(Debug, Serialize)]
struct Timings {
    total_seconds: f64,
}

/// Writes each table under `dir` (file name taken from its schema) and
/// reads it back through the schema.
pub fn write_tables(dir: &Path, tables: &[&Table]) -> Result<Vec<OutputFile>> {
    let mut out = Vec::with_capacity(tables.len());
    for t in tables {
        let file = t.schema.name.rsplit('/').next().unwrap_or(t.schema.name);
        let path = dir.join(file);
        t.write(&path)?;
        let rows = t.schema.validate_file(&path)?;
        out.push(OutputFile { path, rows });
    }
    Ok(out)
}

/// `meta.json` beside the tables: config echo, versions and wall time.
/// Timings live only here so the CSVs stay byte-reproducible.
pub fn write_meta(
    dir: &Path,
    command: &str,
    spec: &SweepSpec,
    jobs: usize,
    outputs: &[OutputFile],
    elapsed: Duration,
) -> Result<()> {
    let meta = Meta {
        command,
        cli_version: env!("CARGO_PKG_VERSION"),
        core_version: pqrc_core::VERSION,
        seed: spec.seed,
        jobs,
        config: spec,
        outputs,
        timings: Timings { total_seconds: elapsed.as_secs_f64() },
    };
    fs::create_dir_all(dir)?;
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}
