//! Quantum reservoir channel and the temporal-learning benchmarks built on it.

mod channel;
mod config;
mod readout;
mod tasks;

pub use channel::{step, z_features, ReservoirChannel, TRACE_DRIFT_TOL};
pub use config::ReservoirConfig;
pub use readout::{capacity, fit_readout, nmse, ridge, FeatureMatrix, Readout, ReadoutFit, Standardizer};
pub use tasks::{
    convergence_rate, memory_inputs, memory_task, narma_inputs, narma_targets, narma_task, run_sequence, Convergence,
    TaskRun, DISTANCE_FLOOR, MEAN_TAU_RANGE, NARMA_ORDER,
};
