//! Declared CSV schemas and a writer that refuses rows not matching them.

use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

/// Column kinds checked when a file is read back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Unsigned integer.
    Uint,
    /// Finite or non-finite float; empty means unavailable.
    Float,
    /// Float that must be present.
    RequiredFloat,
    Bool,
    Text,
}

#[derive(Clone, Copy, Debug)]
pub struct Schema {
    pub name: &'static str,
    pub columns: &'static [(&'static str, Kind)],
}

impl Schema {
    pub fn header(&self) -> Vec<&'static str> {
        self.columns.iter().map(|c| c.0).collect()
    }

    fn check_cell(&self, col: usize, cell: &str) -> std::result::Result<(), String> {
        let (name, kind) = self.columns[col];
        let ok = match kind {
            Kind::Uint => cell.parse::<u64>().is_ok(),
            Kind::Float => cell.is_empty() || cell.parse::<f64>().is_ok(),
            Kind::RequiredFloat => cell.parse::<f64>().is_ok(),
            Kind::Bool => cell == "true" || cell == "false",
            Kind::Text => !cell.contains(['\n', '\r']),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("column {name} ({kind:?}) rejects {cell:?}"))
        }
    }

    /// Reads a file and checks the header and every cell.
    pub fn validate_file(&self, path: &Path) -> Result<usize> {
        let err = |detail: String| CliError::Schema { table: self.name.into(), detail };
        let mut rdr = csv::Reader::from_path(path)?;
        let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
        if header != self.header() {
            return Err(err(format!("header {header:?} differs from {:?}", self.header())));
        }
        let mut rows = 0;
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != self.columns.len() {
                return Err(err(format!("row {rows} has {} cells", rec.len())));
            }
            for (j, cell) in rec.iter().enumerate() {
                self.check_cell(j, cell).map_err(|d| err(format!("row {rows}: {d}")))?;
            }
            rows += 1;
        }
        Ok(rows)
    }
}

/// Text form of a float cell: shortest round-trip digits, exponent form for
/// very small or large magnitudes.
pub fn f(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

/// Rows held in memory until written, so they can be sorted canonically.
#[derive(Clone, Debug)]
pub struct Table {
    pub schema: Schema,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: Schema) -> Self {
        Self { schema, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        let err = |detail: String| CliError::Schema { table: self.schema.name.into(), detail };
        if row.len() != self.schema.columns.len() {
            return Err(err(format!("{} cells for {} columns", row.len(), self.schema.columns.len())));
        }
        for (j, cell) in row.iter().enumerate() {
            self.schema.check_cell(j, cell).map_err(err)?;
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stable sort on the numeric value of the given key columns.
    pub fn sort_by_columns(&mut self, keys: &[&str]) {
        let idx: Vec<usize> = keys
            .iter()
            .map(|k| self.schema.columns.iter().position(|c| c.0 == *k).expect("sort key is a declared column"))
            .collect();
        let num = |s: &str| s.parse::<f64>().unwrap_or(f64::NEG_INFINITY);
        self.rows.sort_by(|a, b| {
            for &j in &idx {
                let o = num(&a[j]).total_cmp(&num(&b[j])).then_with(|| a[j].cmp(&b[j]));
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.schema.header())?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

use Kind::*;

pub const DIAGNOSE_RESULTS: Schema = Schema {
    name: "diagnose/results.csv",
    columns: &[
        ("seed", Uint),
        ("point", Uint),
        ("realization", Uint),
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("p", RequiredFloat),
        ("input", Text),
        ("ct_fraction", RequiredFloat),
        ("entropy", Float),
        ("mean_r", Float),
        ("n_ratios", Uint),
        ("degeneracy_fraction", Float),
        ("total_magic", Float),
        ("magic_m", Float),
        ("magic_r", Float),
        ("mutual_magic", Float),
        ("delta_i", Float),
        ("anti_flatness", Float),
        ("error", Text),
    ],
};

pub const DIAGNOSE_SUMMARY: Schema = Schema {
    name: "diagnose/summary.csv",
    columns: &[
        ("point", Uint),
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("p", RequiredFloat),
        ("input", Text),
        ("realizations", Uint),
        ("failed", Uint),
        ("entropy_mean", Float),
        ("entropy_se", Float),
        ("r_available", Uint),
        ("mean_r", Float),
        ("mean_r_se", Float),
        ("kl_to_gue", Float),
        ("degeneracy_fraction", Float),
        ("total_magic_mean", Float),
        ("total_magic_se", Float),
        ("mutual_magic_mean", Float),
        ("mutual_magic_se", Float),
        ("haar_mutual_magic", Float),
        ("delta_i", Float),
        ("delta_i_se", Float),
        ("delta_i_exceeds_one", Text),
        ("anti_flatness_mean", Float),
        ("anti_flatness_se", Float),
    ],
};

pub const ENTROPY_CURVES: Schema = Schema {
    name: "diagnose/entropy_curves.csv",
    columns: &[
        ("n", Uint),
        ("depth", Uint),
        ("p", RequiredFloat),
        ("layer", Uint),
        ("layer_over_n", RequiredFloat),
        ("rescaled_depth", RequiredFloat),
        ("entropy_mean", Float),
        ("entropy_se", Float),
    ],
};

pub const R_HISTOGRAM: Schema = Schema {
    name: "diagnose/r_histogram.csv",
    columns: &[
        ("n", Uint),
        ("depth", Uint),
        ("p", RequiredFloat),
        ("r_bin_center", RequiredFloat),
        ("empirical_density", RequiredFloat),
        ("surmise_density", RequiredFloat),
    ],
};

pub const TASK_RESULTS: Schema = Schema {
    name: "task/results.csv",
    columns: &[
        ("seed", Uint),
        ("point", Uint),
        ("realization", Uint),
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("p", RequiredFloat),
        ("task", Text),
        ("tau", Text),
        ("capacity", Float),
        ("nmse", Float),
        ("eta", Float),
        ("fit_r2", Float),
        ("contractive", Text),
        ("error", Text),
    ],
};

pub const TASK_SUMMARY: Schema = Schema {
    name: "task/summary.csv",
    columns: &[
        ("point", Uint),
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("p", RequiredFloat),
        ("task", Text),
        ("tau", Text),
        ("realizations", Uint),
        ("capacity_mean", Float),
        ("capacity_se", Float),
        ("capacity_sd", Float),
        ("nmse_mean", Float),
        ("eta_mean", Float),
        ("eta_se", Float),
        ("contractive_fraction", Float),
    ],
};

pub const MEMORY_CURVES: Schema = Schema {
    name: "task/memory_curves.csv",
    columns: &[
        ("n", Uint),
        ("depth", Uint),
        ("p", RequiredFloat),
        ("tau", Uint),
        ("capacity_mean", Float),
        ("capacity_se", Float),
    ],
};

pub const SCALING_RESULTS: Schema = Schema {
    name: "scaling/results.csv",
    columns: &[
        ("seed", Uint),
        ("point", Uint),
        ("realization", Uint),
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("p", RequiredFloat),
        ("anti_flatness", Float),
        ("error", Text),
    ],
};

pub const FLATNESS: Schema = Schema {
    name: "scaling/flatness.csv",
    columns: &[
        ("point", Uint),
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("p", RequiredFloat),
        ("realizations", Uint),
        ("anti_flatness_mean", Float),
        ("anti_flatness_se", Float),
        ("haar_anti_flatness", Float),
        ("ratio_to_haar", Float),
    ],
};

pub const ALPHA: Schema = Schema {
    name: "scaling/alpha.csv",
    columns: &[
        ("source", Text),
        ("d_over_n", Float),
        ("p", Float),
        ("alpha", Float),
        ("c", Float),
        ("r2", Float),
        ("sizes", Uint),
        ("status", Text),
    ],
};

pub const HAAR: Schema = Schema {
    name: "haar/haar.csv",
    columns: &[
        ("n", Uint),
        ("samples", Uint),
        ("seed", Uint),
        ("purity_mean", RequiredFloat),
        ("purity_se", RequiredFloat),
        ("anti_flatness_mean", RequiredFloat),
        ("anti_flatness_se", RequiredFloat),
        ("total_magic_mean", Float),
        ("total_magic_se", Float),
        ("mutual_magic_mean", Float),
        ("mutual_magic_se", Float),
    ],
};

pub const CROSSOVERS: Schema = Schema {
    name: "crossovers/crossovers.csv",
    columns: &[
        ("n", Uint),
        ("depth", Uint),
        ("d_over_n", RequiredFloat),
        ("input", Text),
        ("p_star", Float),
        ("p_star_reliable", Bool),
        ("p_sharp", Float),
        ("p_sharp_reliable", Bool),
        ("delta_i_plateau", Float),
        ("method", Text),
    ],
};
