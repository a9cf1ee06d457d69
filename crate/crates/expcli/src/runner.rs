//! Grid expansion, per-realization seeding and the worker pool.

use rayon::prelude::*;
use rayon::ThreadPool;

use pqrc_core::rng::child_seed;

use crate::config::depth_for;
use crate::error::{CliError, Result};

/// One grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub index: usize,
    pub n: usize,
    pub d_over_n: f64,
    pub depth: usize,
    pub p: f64,
}

/// Expands `(n, d_over_n, p)` grids in that nesting order.
pub fn expand_grid(ns: &[usize], ratios: &[f64], ps: &[f64]) -> Vec<Point> {
    let mut out = Vec::new();
    for &n in ns {
        for &d_over_n in ratios {
            for &p in ps {
                out.push(Point { index: out.len(), n, d_over_n, depth: depth_for(n, d_over_n), p });
            }
        }
    }
    out
}

/// Seed of realization `r` at grid point `point`: the splitmix64 fold of
/// `(master, point, r)`.
pub fn realization_seed(master: u64, point: usize, realization: usize) -> u64 {
    child_seed(master, &[point as u64, realization as u64])
}

pub fn build_pool(jobs: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}

/// Runs `work(point, realization, seed)` for every realization of every
/// point on `pool`. Output order is `(point, realization)` whatever the
/// worker count.
pub fn run_realizations<T, F>(pool: &ThreadPool, points: &[Point], realizations: usize, master: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Point, usize, u64) -> T + Sync,
{
    let items: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|i| (0..realizations).map(move |r| (i, r))).collect();
    pool.install(|| {
        items
            .par_iter()
            .map(|&(i, r)| {
                let pt = &points[i];
                work(pt, r, realization_seed(master, pt.index, r))
            })
            .collect()
    })
}
