//! Exact dense simulation of probabilistic Clifford+CT brickwork reservoirs,
//! with entanglement-spectrum, magic and temporal-learning diagnostics.

pub mod circuit;
pub mod error;
pub mod magic;
pub mod qcore;
pub mod reservoir;
pub mod rng;
pub mod spectra;
pub mod stats;

pub use error::{Error, Result};

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
