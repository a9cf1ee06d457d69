//! Realization averages.

use pqrc_core::stats::{mean_and_se, std_dev};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
    /// Realization spread.
    pub sd: f64,
    pub count: usize,
}

/// `None` for an empty sample.
pub fn estimate(values: &[f64]) -> Option<Estimate> {
    if values.is_empty() {
        return None;
    }
    let (mean, se) = mean_and_se(values);
    Some(Estimate { mean, se, sd: std_dev(values), count: values.len() })
}

pub fn estimate_of<I: IntoIterator<Item = Option<f64>>>(values: I) -> Option<Estimate> {
    estimate(&values.into_iter().flatten().collect::<Vec<_>>())
}

pub fn mean(e: Option<Estimate>) -> Option<f64> {
    e.map(|e| e.mean)
}

pub fn se(e: Option<Estimate>) -> Option<f64> {
    e.map(|e| e.se)
}
