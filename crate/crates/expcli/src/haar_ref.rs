//! Haar-random reference table.

use std::path::Path;

use log::info;

use pqrc_core::magic::{HaarCache, HaarReference};

use crate::config::SweepSpec;
use crate::error::Result;
use crate::meta::{write_tables, OutputFile};
use crate::runner::build_pool;
use crate::table::{f, opt, Table, HAAR};

#[derive(Clone, Debug)]
pub struct HaarOutput {
    pub references: Vec<HaarReference>,
    pub table: Table,
}

impl HaarOutput {
    pub fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        write_tables(dir, &[&self.table])
    }
}

/// Magic columns are empty above the Pauli-transform cap.
pub fn run(spec: &SweepSpec, jobs: usize) -> Result<HaarOutput> {
    let pool = build_pool(jobs)?;
    let cache = HaarCache::new(spec.out.join("haar_cache"));
    let mut references = Vec::new();
    let mut table = Table::new(HAAR);
    for &n in &spec.haar.n {
        info!("Haar reference N = {n}, {} samples", spec.haar.samples);
        let r = pool.install(|| cache.load_or_compute(n, spec.haar.samples, spec.seed))?;
        table.push(vec![
            r.n_qubits.to_string(),
            r.samples.to_string(),
            r.seed.to_string(),
            f(r.mean_purity),
            f(r.se_purity),
            f(r.mean_anti_flatness),
            f(r.se_anti_flatness),
            opt(r.mean_total_magic),
            opt(r.se_total_magic),
            opt(r.mean_mutual_magic),
            opt(r.se_mutual_magic),
        ])?;
        references.push(r);
    }
    table.sort_by_columns(&["n"]);
    Ok(HaarOutput { references, table })
}
