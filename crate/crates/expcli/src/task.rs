//! Reservoir benchmark sweep: delay memory, NARMA and echo-state convergence.

use std::collections::BTreeMap;
use std::path::Path;

use log::{info, warn};

use pqrc_core::qcore::{DensityMatrix, StateVector};
use pqrc_core::reservoir::{convergence_rate, memory_inputs, memory_task, narma_task, ReservoirConfig, MEAN_TAU_RANGE};
use pqrc_core::rng::{child_seed, rng_from_seed, stream};

use crate::agg::{estimate_of, mean, se, Estimate};
use crate::config::{SweepSpec, TaskSpec};
use crate::error::Result;
use crate::meta::{write_tables, OutputFile};
use crate::runner::{build_pool, expand_grid, run_realizations, Point};
use crate::table::{f, opt, Table, MEMORY_CURVES, TASK_RESULTS, TASK_SUMMARY};

/// Reservoir configuration of one realization.
pub fn reservoir_config(pt: &Point, t: &TaskSpec, seed: u64) -> ReservoirConfig {
    let mut cfg = ReservoirConfig::new(pt.n, pt.depth, pt.p, child_seed(seed, &[stream::TEMPLATE]));
    cfg.steps = t.steps;
    cfg.washout = t.washout;
    cfg.input_scale = t.input_scale;
    cfg.ridge_lambda = t.ridge_lambda;
    cfg.train_fraction = t.train_fraction;
    cfg.all_qubit_observables = t.all_qubit_observables;
    cfg
}

/// One row of `task/results.csv` before formatting.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskRecord {
    pub point: usize,
    pub realization: usize,
    pub seed: u64,
    /// `memory`, `memory_mean`, `narma` or `convergence`.
    pub task: &'static str,
    pub tau: String,
    pub capacity: Option<f64>,
    pub nmse: Option<f64>,
    pub eta: Option<f64>,
    pub fit_r2: Option<f64>,
    pub contractive: Option<bool>,
    pub error: Option<String>,
}

impl TaskRecord {
    fn new(pt: &Point, r: usize, seed: u64, task: &'static str, tau: String) -> Self {
        Self { point: pt.index, realization: r, seed, task, tau, capacity: None, nmse: None, eta: None, fit_r2: None, contractive: None, error: None }
    }

    fn failed(mut self, e: impl ToString) -> Self {
        self.error = Some(e.to_string());
        self
    }
}

pub fn mean_tau_label() -> String {
    format!("{}-{}", MEAN_TAU_RANGE.start(), MEAN_TAU_RANGE.end())
}

fn run_one(pt: &Point, r: usize, seed: u64, t: &TaskSpec) -> Vec<TaskRecord> {
    let cfg = reservoir_config(pt, t, seed);
    let template = match cfg.validate().and_then(|_| cfg.template()) {
        Ok(tpl) => tpl,
        Err(e) => {
            warn!("point {} realization {r}: {e}", pt.index);
            return vec![TaskRecord::new(pt, r, seed, "setup", String::new()).failed(e)];
        }
    };
    let mut out = Vec::new();

    if t.memory {
        let mut rng = rng_from_seed(child_seed(seed, &[stream::INPUTS]));
        match memory_task(&cfg, &template, t.max_tau, &mut rng) {
            Ok(run) => {
                for (tau, c) in run.capacities.iter().enumerate() {
                    let mut rec = TaskRecord::new(pt, r, seed, "memory", tau.to_string());
                    rec.capacity = Some(*c);
                    if tau == 1.min(t.max_tau) {
                        rec.nmse = Some(run.nmse);
                    }
                    out.push(rec);
                }
                let mut rec = TaskRecord::new(pt, r, seed, "memory_mean", mean_tau_label());
                rec.capacity = run.mean_capacity();
                out.push(rec);
            }
            Err(e) => {
                warn!("memory task, point {} realization {r}: {e}", pt.index);
                out.push(TaskRecord::new(pt, r, seed, "memory", String::new()).failed(e));
            }
        }
    }

    if t.narma {
        let mut rec = TaskRecord::new(pt, r, seed, "narma", t.narma_order.to_string());
        match narma_task(&cfg, &template, t.narma_order) {
            Ok(run) => {
                rec.capacity = Some(run.capacity);
                rec.nmse = Some(run.nmse);
            }
            Err(e) => {
                warn!("narma task, point {} realization {r}: {e}", pt.index);
                rec = rec.failed(e);
            }
        }
        out.push(rec);
    }

    if t.convergence {
        let mut rec = TaskRecord::new(pt, r, seed, "convergence", String::new());
        let result = (|| -> pqrc_core::Result<_> {
            let mut short = cfg.clone();
            short.steps = t.convergence_steps;
            let inputs = memory_inputs(&short, &mut rng_from_seed(child_seed(seed, &[stream::INPUTS, 1])));
            let m = cfg.memory.len();
            let a = DensityMatrix::zero_state(m)?;
            let b = StateVector::basis(m, (1 << m) - 1)?.to_density()?;
            convergence_rate(&cfg, &template, &inputs, &a, &b)
        })();
        match result {
            Ok(conv) => {
                rec.eta = conv.eta();
                rec.fit_r2 = conv.fit.map(|f| f.r2);
                rec.contractive = Some(conv.is_contractive());
                if conv.fit.is_none() && !conv.collapsed() {
                    rec.error = Some("distance not resolvable; no decay fit".into());
                }
            }
            Err(e) => {
                warn!("convergence, point {} realization {r}: {e}", pt.index);
                rec = rec.failed(e);
            }
        }
        out.push(rec);
    }
    out
}

/// Averages over realizations for one `(point, task, tau)`.
#[derive(Clone, Debug)]
pub struct TaskPoint {
    pub point: Point,
    pub task: &'static str,
    pub tau: String,
    pub capacity: Option<Estimate>,
    pub nmse: Option<Estimate>,
    pub eta: Option<Estimate>,
    pub contractive_fraction: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TaskOutput {
    pub records: Vec<TaskRecord>,
    pub points: Vec<TaskPoint>,
    pub results: Table,
    pub summary: Table,
    pub memory_curves: Table,
}

impl TaskOutput {
    pub fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        write_tables(dir, &[&self.results, &self.summary, &self.memory_curves])
    }

    pub fn find(&self, n: usize, p: f64, task: &str) -> Option<&TaskPoint> {
        self.points.iter().find(|s| s.point.n == n && s.point.p == p && s.task == task)
    }

    /// Per-realization values of one `(point, task, tau)`.
    pub fn values(&self, point: usize, task: &str, tau: &str) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.point == point && r.task == task && r.tau == tau)
            .filter_map(|r| if task == "convergence" { r.eta } else { r.capacity })
            .collect()
    }
}

fn task_order(task: &str) -> usize {
    ["memory", "memory_mean", "narma", "convergence", "setup"].iter().position(|t| *t == task).unwrap_or(usize::MAX)
}

pub fn run(spec: &SweepSpec, jobs: usize) -> Result<TaskOutput> {
    let t = &spec.task;
    let points = expand_grid(&t.n, &t.d_over_n, &t.p);
    let pool = build_pool(jobs)?;
    info!("task: {} points x {} realizations on {jobs} workers", points.len(), spec.realizations);
    let records: Vec<TaskRecord> =
        run_realizations(&pool, &points, spec.realizations, spec.seed, |pt, r, seed| run_one(pt, r, seed, t))
            .into_iter()
            .flatten()
            .collect();

    let mut results = Table::new(TASK_RESULTS);
    for rec in &records {
        let pt = &points[rec.point];
        results.push(vec![
            rec.seed.to_string(),
            pt.index.to_string(),
            rec.realization.to_string(),
            pt.n.to_string(),
            pt.depth.to_string(),
            f(pt.d_over_n),
            f(pt.p),
            rec.task.into(),
            rec.tau.clone(),
            opt(rec.capacity),
            opt(rec.nmse),
            opt(rec.eta),
            opt(rec.fit_r2),
            rec.contractive.map(|c| c.to_string()).unwrap_or_default(),
            rec.error.clone().unwrap_or_default(),
        ])?;
    }

    // Keyed by point, task and numeric delay.
    let mut groups: BTreeMap<(usize, usize, usize, String), Vec<&TaskRecord>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.task != "setup") {
        let tau_key = rec.tau.parse::<usize>().unwrap_or(usize::MAX);
        groups.entry((rec.point, task_order(rec.task), tau_key, rec.tau.clone())).or_default().push(rec);
    }
    let mut summaries = Vec::new();
    let mut summary = Table::new(TASK_SUMMARY);
    let mut curves = Table::new(MEMORY_CURVES);
    for ((point, _, _, tau), recs) in &groups {
        let pt = &points[*point];
        let task = recs[0].task;
        let capacity = estimate_of(recs.iter().map(|r| r.capacity));
        let eta = estimate_of(recs.iter().map(|r| r.eta));
        let contractive = (task == "convergence")
            .then(|| recs.iter().filter(|r| r.contractive == Some(true)).count() as f64 / recs.len() as f64);
        let s = TaskPoint {
            point: *pt,
            task,
            tau: tau.clone(),
            capacity,
            nmse: estimate_of(recs.iter().map(|r| r.nmse)),
            eta,
            contractive_fraction: contractive,
        };
        summary.push(vec![
            pt.index.to_string(),
            pt.n.to_string(),
            pt.depth.to_string(),
            f(pt.d_over_n),
            f(pt.p),
            task.into(),
            tau.clone(),
            recs.len().to_string(),
            opt(mean(capacity)),
            opt(se(capacity)),
            opt(capacity.map(|e| e.sd)),
            opt(mean(s.nmse)),
            opt(mean(eta)),
            opt(se(eta)),
            opt(contractive),
        ])?;
        if task == "memory" {
            curves.push(vec![
                pt.n.to_string(),
                pt.depth.to_string(),
                f(pt.p),
                tau.clone(),
                opt(mean(capacity)),
                opt(se(capacity)),
            ])?;
        }
        summaries.push(s);
    }
    curves.sort_by_columns(&["n", "depth", "p", "tau"]);

    Ok(TaskOutput { records, points: summaries, results, summary, memory_curves: curves })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SweepSpec {
        let mut spec = SweepSpec::default();
        spec.realizations = 2;
        spec.task.n = vec![4];
        spec.task.p = vec![0.0, 0.5];
        spec.task.d_over_n = vec![1.0];
        spec.task.steps = 300;
        spec.task.washout = 100;
        spec.task.max_tau = 4;
        spec.task.convergence_steps = 40;
        spec
    }

    #[test]
    fn rows_per_realization() {
        let out = run(&tiny(), 1).unwrap();
        // 5 delays + mean + narma + convergence
        assert_eq!(out.records.len(), 2 * 2 * 8);
        assert!(out.records.iter().filter(|r| r.task != "convergence").all(|r| r.error.is_none()));
        assert_eq!(out.memory_curves.len(), 2 * 5);
        let m = out.find(4, 0.5, "memory_mean").unwrap();
        assert_eq!(m.tau, "1-12");
        assert_eq!(m.capacity.unwrap().count, 2);
        assert_eq!(out.values(1, "memory", "0").len(), 2);
    }

    #[test]
    fn clifford_reservoir_forgets_input() {
        let out = run(&tiny(), 1).unwrap();
        let c0 = |p| out.find(4, p, "memory").unwrap().capacity.unwrap().mean;
        assert!(c0(0.0) < 1e-12);
        assert!(c0(0.5) > 0.1);
    }
}
