//! Size scaling of the half-cut anti-flatness and its decay exponent.

use std::path::Path;

use log::{info, warn};

use pqrc_core::magic::{anti_flatness, haar_flatness, scrambling_exponent, HaarReference, ScalingFit};
use pqrc_core::qcore::Subsystem;

use crate::agg::{estimate_of, mean, se, Estimate};
use crate::config::SweepSpec;
use crate::diagnose::prepare;
use crate::error::Result;
use crate::meta::{write_tables, OutputFile};
use crate::runner::{build_pool, expand_grid, run_realizations, Point};
use crate::table::{f, opt, Table, ALPHA, FLATNESS, SCALING_RESULTS};

#[derive(Clone, Debug)]
pub struct AlphaRow {
    /// `circuit` or `haar`.
    pub source: &'static str,
    pub d_over_n: Option<f64>,
    pub p: Option<f64>,
    pub fit: Option<ScalingFit>,
    pub sizes: usize,
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct ScalingOutput {
    pub flatness: Vec<(Point, Option<Estimate>)>,
    pub haar: Vec<HaarReference>,
    pub alpha: Vec<AlphaRow>,
    pub results: Table,
    pub flatness_table: Table,
    pub alpha_table: Table,
}

impl ScalingOutput {
    pub fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        write_tables(dir, &[&self.results, &self.flatness_table, &self.alpha_table])
    }

    pub fn alpha_at(&self, p: f64) -> Option<&AlphaRow> {
        self.alpha.iter().find(|a| a.source == "circuit" && a.p == Some(p))
    }

    pub fn haar_alpha(&self) -> Option<&AlphaRow> {
        self.alpha.iter().find(|a| a.source == "haar")
    }
}

fn fit_row(source: &'static str, d_over_n: Option<f64>, p: Option<f64>, pts: &[(usize, f64)]) -> AlphaRow {
    let (fit, status) = match scrambling_exponent(pts) {
        Ok(fit) => (Some(fit), "ok".to_string()),
        Err(e) => (None, format!("undefined: {e}")),
    };
    AlphaRow { source, d_over_n, p, fit, sizes: pts.len(), status }
}

fn one(pt: &Point, seed: u64, spec: &SweepSpec) -> Result<f64> {
    let (template, mut psi) = prepare(pt, spec.scaling.input, seed)?;
    template.apply(&mut psi)?;
    Ok(anti_flatness(&psi, &Subsystem::first_half(pt.n)?)?)
}

pub fn run(spec: &SweepSpec, jobs: usize) -> Result<ScalingOutput> {
    let s = &spec.scaling;
    let points = expand_grid(&s.n, &s.d_over_n, &s.p);
    let pool = build_pool(jobs)?;
    info!("scaling: {} points x {} realizations on {jobs} workers", points.len(), spec.realizations);
    let runs = run_realizations(&pool, &points, spec.realizations, spec.seed, |pt, r, seed| {
        let v = one(pt, seed, spec);
        if let Err(e) = &v {
            warn!("point {} realization {r}: {e}", pt.index);
        }
        (pt.index, r, seed, v.map_err(|e| e.to_string()))
    });

    let mut results = Table::new(SCALING_RESULTS);
    for (point, r, seed, v) in &runs {
        let pt = &points[*point];
        results.push(vec![
            seed.to_string(),
            point.to_string(),
            r.to_string(),
            pt.n.to_string(),
            pt.depth.to_string(),
            f(pt.d_over_n),
            f(pt.p),
            opt(v.as_ref().ok().copied()),
            v.as_ref().err().cloned().unwrap_or_default(),
        ])?;
    }

    let mut haar = Vec::new();
    if s.haar {
        for &n in &s.n {
            haar.push(pool.install(|| haar_flatness(n, s.haar_samples, spec.seed))?);
        }
    }
    let haar_f = |n: usize| haar.iter().find(|h| h.n_qubits == n).map(|h| h.mean_anti_flatness);

    let mut flatness = Vec::new();
    let mut flatness_table = Table::new(FLATNESS);
    for pt in &points {
        let est = estimate_of(runs.iter().filter(|x| x.0 == pt.index).map(|x| x.3.as_ref().ok().copied()));
        let h = haar_f(pt.n);
        let ratio = match (mean(est), h) {
            (Some(m), Some(h)) if h > 0.0 => Some(m / h),
            _ => None,
        };
        flatness_table.push(vec![
            pt.index.to_string(),
            pt.n.to_string(),
            pt.depth.to_string(),
            f(pt.d_over_n),
            f(pt.p),
            est.map_or(0, |e| e.count).to_string(),
            opt(mean(est)),
            opt(se(est)),
            opt(h),
            opt(ratio),
        ])?;
        flatness.push((*pt, est));
    }

    let mut alpha = Vec::new();
    if s.haar {
        let pts: Vec<(usize, f64)> = haar.iter().map(|h| (h.n_qubits, h.mean_anti_flatness)).collect();
        alpha.push(fit_row("haar", None, None, &pts));
    }
    for &r in &s.d_over_n {
        for &p in &s.p {
            let pts: Vec<(usize, f64)> = flatness
                .iter()
                .filter(|(pt, _)| pt.d_over_n == r && pt.p == p)
                .filter_map(|(pt, e)| e.map(|e| (pt.n, e.mean)))
                .collect();
            alpha.push(fit_row("circuit", Some(r), Some(p), &pts));
        }
    }
    let mut alpha_table = Table::new(ALPHA);
    for a in &alpha {
        alpha_table.push(vec![
            a.source.into(),
            opt(a.d_over_n),
            opt(a.p),
            opt(a.fit.map(|x| x.alpha)),
            opt(a.fit.map(|x| x.c)),
            opt(a.fit.map(|x| x.r2)),
            a.sizes.to_string(),
            a.status.clone(),
        ])?;
    }

    Ok(ScalingOutput { flatness, haar, alpha, results, flatness_table, alpha_table })
}
