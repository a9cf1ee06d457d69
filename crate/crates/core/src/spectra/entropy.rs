use crate::error::{Error, Result};
use crate::qcore::DensityMatrix;

/// Eigenvalues below this are rejected as unphysical.
pub const NEGATIVE_EIG_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyOrder {
    VonNeumann,
    Renyi2,
}

/// Base-2 entropy of a spectrum.
pub fn entropy_from_eigenvalues(eigs: &[f64], order: EntropyOrder) -> Result<f64> {
    if let Some(&low) = eigs.iter().find(|&&l| l < -NEGATIVE_EIG_TOL) {
        return Err(Error::NegativeEigenvalue(low));
    }
    let s = match order {
        EntropyOrder::VonNeumann => -eigs.iter().filter(|&&l| l > 0.0).map(|&l| l * l.log2()).sum::<f64>(),
        EntropyOrder::Renyi2 => -eigs.iter().map(|&l| l * l).sum::<f64>().log2(),
    };
    Ok(s.max(0.0))
}

pub fn entanglement_entropy(rho: &DensityMatrix, order: EntropyOrder) -> Result<f64> {
    entropy_from_eigenvalues(&rho.eigenvalues()?, order)
}
