//! Heuristic crossover locators on a diagnose summary.
//!
//! `p*` is the first grid `p` where the pooled spacing ratio falls below the
//! midpoint of the GUE plateau and the Poisson value, with a monotone decline
//! afterwards. `p#` is the first grid `p` past the minimum of the mutual-magic
//! gap where the gap exceeds twice its plateau mean. Both are operational
//! markers, not sharp transition points.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::meta::{write_tables, OutputFile};
use crate::table::{f, opt, Table, CROSSOVERS, DIAGNOSE_SUMMARY};

/// Midpoint of the chaotic plateau 0.6 and the Poisson value 0.39.
pub const R_THRESHOLD: f64 = (0.6 + 0.39) / 2.0;
/// Rises smaller than this count as noise in the monotonicity checks.
pub const MONOTONE_TOL: f64 = 0.02;
pub const METHOD: &str = "HEURISTIC";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossover {
    pub p: Option<f64>,
    pub reliable: bool,
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL)
}

fn non_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOL)
}

/// `ps` ascending. An unavailable ratio at `p > 0` means the spectrum is
/// fully degenerate and counts as below threshold; at `p = 0` the point is
/// skipped.
pub fn locate_p_star(ps: &[f64], mean_r: &[Option<f64>]) -> Crossover {
    let pts: Vec<(f64, f64)> = ps
        .iter()
        .zip(mean_r)
        .filter_map(|(&p, r)| match r {
            Some(r) => Some((p, *r)),
            None if p > 0.0 => Some((p, 0.0)),
            None => None,
        })
        .collect();
    let Some(i) = pts.iter().position(|&(_, r)| r < R_THRESHOLD) else {
        return Crossover { p: None, reliable: false };
    };
    let tail: Vec<f64> = pts[i..].iter().map(|x| x.1).collect();
    let reliable = tail.iter().all(|&r| r < R_THRESHOLD) && non_increasing(&tail);
    Crossover { p: Some(pts[i].0), reliable }
}

/// `ps` ascending; only `p > 0` with an available gap enters. Returns the
/// plateau mean alongside the estimate.
pub fn locate_p_sharp(ps: &[f64], delta_i: &[Option<f64>]) -> (Crossover, Option<f64>) {
    let pts: Vec<(f64, f64)> =
        ps.iter().zip(delta_i).filter_map(|(&p, d)| d.filter(|_| p > 0.0).map(|d| (p, d))).collect();
    if pts.len() < 3 {
        return (Crossover { p: None, reliable: false }, None);
    }
    let m = pts.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|x| x.0).unwrap();
    let plateau = pts[..=m].iter().map(|x| x.1).sum::<f64>() / (m + 1) as f64;
    let hit = pts[m + 1..].iter().find(|&&(_, d)| d > 2.0 * plateau).map(|x| x.0);
    let tail: Vec<f64> = pts[m..].iter().map(|x| x.1).collect();
    (Crossover { p: hit, reliable: hit.is_some() && non_decreasing(&tail) }, Some(plateau))
}

#[derive(Debug, Deserialize)]
struct SummaryRow {
    n: usize,
    depth: usize,
    d_over_n: f64,
    p: f64,
    input: String,
    mean_r: Option<f64>,
    delta_i: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct CrossoverRow {
    pub n: usize,
    pub depth: usize,
    pub d_over_n: f64,
    pub input: String,
    pub p_star: Crossover,
    pub p_sharp: Crossover,
    pub plateau: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct CrossoverOutput {
    pub rows: Vec<CrossoverRow>,
    pub table: Table,
}

impl CrossoverOutput {
    pub fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        write_tables(dir, &[&self.table])
    }
}

/// Reads a diagnose summary and locates both crossovers per `(N, depth, input)`.
pub fn run(summary: &Path) -> Result<CrossoverOutput> {
    DIAGNOSE_SUMMARY.validate_file(summary)?;
    let mut groups: BTreeMap<(usize, usize, String), Vec<SummaryRow>> = BTreeMap::new();
    for row in csv::Reader::from_path(summary)?.deserialize::<SummaryRow>() {
        let row = row?;
        groups.entry((row.n, row.depth, row.input.clone())).or_default().push(row);
    }
    if groups.is_empty() {
        return Err(CliError::Config(format!("{} has no rows", summary.display())));
    }
    let mut rows = Vec::new();
    let mut table = Table::new(CROSSOVERS);
    for ((n, depth, input), mut g) in groups {
        g.sort_by(|a, b| a.p.total_cmp(&b.p));
        let ps: Vec<f64> = g.iter().map(|r| r.p).collect();
        let p_star = locate_p_star(&ps, &g.iter().map(|r| r.mean_r).collect::<Vec<_>>());
        let (p_sharp, plateau) = locate_p_sharp(&ps, &g.iter().map(|r| r.delta_i).collect::<Vec<_>>());
        table.push(vec![
            n.to_string(),
            depth.to_string(),
            f(g[0].d_over_n),
            input.clone(),
            opt(p_star.p),
            p_star.reliable.to_string(),
            opt(p_sharp.p),
            p_sharp.reliable.to_string(),
            opt(plateau),
            METHOD.into(),
        ])?;
        rows.push(CrossoverRow { n, depth, d_over_n: g[0].d_over_n, input, p_star, p_sharp, plateau });
    }
    Ok(CrossoverOutput { rows, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..=10).map(|i| i as f64 / 10.0).collect()
    }

    #[test]
    fn synthetic_step() {
        let ps = grid();
        let r: Vec<Option<f64>> = ps.iter().map(|&p| Some(if p < 0.55 { 0.6 } else { 0.39 })).collect();
        assert_eq!(locate_p_star(&ps, &r), Crossover { p: Some(0.6), reliable: true });
    }

    #[test]
    fn flat_table_is_unreliable() {
        let ps = grid();
        let r = vec![Some(0.6); ps.len()];
        assert_eq!(locate_p_star(&ps, &r), Crossover { p: None, reliable: false });
    }

    #[test]
    fn rebound_is_unreliable() {
        let ps = grid();
        let mut r: Vec<Option<f64>> = ps.iter().map(|&p| Some(if p < 0.55 { 0.6 } else { 0.39 })).collect();
        r[8] = Some(0.58);
        let c = locate_p_star(&ps, &r);
        assert_eq!(c.p, Some(0.6));
        assert!(!c.reliable);
    }

    #[test]
    fn unavailable_counts_as_classical() {
        let ps = grid();
        let mut r = vec![Some(0.6); ps.len()];
        r[0] = None;
        r[10] = None;
        assert_eq!(locate_p_star(&ps, &r), Crossover { p: Some(1.0), reliable: true });
    }

    #[test]
    fn sharp_after_plateau() {
        let ps = grid();
        let d = [1.0, 0.12, 0.01, 0.04, 0.07, 0.17, 0.29, 0.41, 0.66, 0.87, 1.0].map(Some);
        let (c, plateau) = locate_p_sharp(&ps, &d);
        assert!((plateau.unwrap() - 0.065).abs() < 1e-12);
        assert_eq!(c, Crossover { p: Some(0.5), reliable: true });

        let mut bumpy = d;
        bumpy[7] = Some(0.1);
        assert!(!locate_p_sharp(&ps, &bumpy).0.reliable);
        assert!(!locate_p_sharp(&ps[..3], &d[..3]).0.reliable);
    }
}
