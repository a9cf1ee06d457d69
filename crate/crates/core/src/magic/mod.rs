//! Nonstabilizerness diagnostics: Pauli spectra, second stabilizer Renyi
//! entropy, mutual magic, anti-flatness and their Haar baselines.

mod haar;
mod pauli;
mod sre;

pub use haar::{haar_flatness, haar_reference, HaarCache, HaarReference, MIN_HAAR_SAMPLES};
pub use pauli::{pauli_transform, pauli_transform_capped, PauliSpectrum, PAULI_CAP};
pub use sre::{
    anti_flatness, anti_flatness_from_eigenvalues, mutual_magic, relative_gap, sre2, sre2_pure, MagicReport,
    RelativeGap,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::fit_linear;

/// `log2 F = -alpha N + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub alpha: f64,
    pub c: f64,
    pub r2: f64,
}

/// Fits the anti-flatness decay exponent over system sizes.
///
/// Fails with [`Error::Degenerate`] when any mean is nonpositive (the
/// stabilizer limit), where the exponent is undefined.
pub fn scrambling_exponent(points: &[(usize, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!("need >= 3 system sizes, got {}", points.len())));
    }
    if let Some(&(n, f)) = points.iter().find(|(_, f)| !(*f > 0.0)) {
        return Err(Error::Degenerate(format!("anti-flatness {f} at N = {n}; exponent undefined")));
    }
    let x: Vec<f64> = points.iter().map(|&(n, _)| n as f64).collect();
    let y: Vec<f64> = points.iter().map(|&(_, f)| f.log2()).collect();
    let lin = fit_linear(&x, &y)?;
    Ok(ScalingFit { alpha: -lin.slope, c: lin.intercept, r2: lin.r2 })
}
