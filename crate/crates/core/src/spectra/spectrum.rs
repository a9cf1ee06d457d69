//! Entanglement spectra and level-spacing ratios.

use serde::{Deserialize, Serialize};

use super::surmise::{kl_to_gue, DEFAULT_BINS};
use crate::error::{Error, Result};
use crate::qcore::DensityMatrix;

/// Default eigenvalue cutoff for retained levels.
pub const DEFAULT_CUTOFF: f64 = 1e-12;
/// Level gaps below this count as exact degeneracies.
pub const DEGENERATE_GAP: f64 = 1e-10;

/// Levels `eps_i = -log2(lambda_i)` sorted so that `eps_i >= eps_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSpectrum {
    pub levels: Vec<f64>,
    /// Fraction of consecutive gaps below [`DEGENERATE_GAP`]; 1 when there is no gap at all.
    pub degeneracy_fraction: f64,
    /// Total weight of eigenvalues below the cutoff.
    pub discarded_weight: f64,
}

impl EntanglementSpectrum {
    pub fn from_eigenvalues(eigs: &[f64], cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidParameter(format!("cutoff {cutoff} outside (0, 1)")));
        }
        let mut kept: Vec<f64> = eigs.iter().copied().filter(|&l| l >= cutoff).collect();
        if kept.is_empty() {
            return Err(Error::Degenerate("every eigenvalue is below the cutoff".into()));
        }
        let discarded_weight = eigs.iter().filter(|&&l| l < cutoff).map(|l| l.max(0.0)).sum();
        kept.sort_by(f64::total_cmp);
        let levels: Vec<f64> = kept.iter().map(|l| -l.log2()).collect();
        let gaps = levels.len() - 1;
        let degeneracy_fraction = if gaps == 0 {
            1.0
        } else {
            levels.windows(2).filter(|w| w[0] - w[1] < DEGENERATE_GAP).count() as f64 / gaps as f64
        };
        Ok(Self { levels, degeneracy_fraction, discarded_weight })
    }

    pub fn from_density(rho: &DensityMatrix, cutoff: f64) -> Result<Self> {
        Self::from_eigenvalues(&rho.eigenvalues()?, cutoff)
    }

    /// `sum 2^{-eps}` over retained levels.
    pub fn retained_weight(&self) -> f64 {
        self.levels.iter().map(|e| (-e).exp2()).sum()
    }

    /// Distinct levels after merging gaps below [`DEGENERATE_GAP`].
    pub fn distinct_levels(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.levels.len());
        for &e in &self.levels {
            match out.last() {
                Some(&last) if last - e < DEGENERATE_GAP => {}
                _ => out.push(e),
            }
        }
        out
    }
}

/// Ratio statistics of one spectrum (or a pooled set).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumStats {
    pub r_values: Vec<f64>,
    /// `None` when fewer than three distinct levels survive (flat, Clifford-like spectra).
    pub mean_r: Option<f64>,
    pub kl_to_gue: Option<f64>,
    pub degeneracy_fraction: f64,
}

impl SpectrumStats {
    pub fn is_available(&self) -> bool {
        self.mean_r.is_some()
    }

    /// Pools the ratios of many spectra.
    pub fn pooled(parts: &[SpectrumStats], bins: usize) -> Result<SpectrumStats> {
        let r_values: Vec<f64> = parts.iter().flat_map(|s| s.r_values.iter().copied()).collect();
        let degeneracy_fraction = if parts.is_empty() {
            0.0
        } else {
            parts.iter().map(|s| s.degeneracy_fraction).sum::<f64>() / parts.len() as f64
        };
        Self::from_ratios(r_values, degeneracy_fraction, bins)
    }

    fn from_ratios(r_values: Vec<f64>, degeneracy_fraction: f64, bins: usize) -> Result<Self> {
        if r_values.is_empty() {
            return Ok(Self { r_values, mean_r: None, kl_to_gue: None, degeneracy_fraction });
        }
        let mean_r = r_values.iter().sum::<f64>() / r_values.len() as f64;
        let kl = kl_to_gue(&r_values, bins)?;
        Ok(Self { r_values, mean_r: Some(mean_r), kl_to_gue: Some(kl), degeneracy_fraction })
    }
}

/// Consecutive-gap ratios `min(d_i, d_{i+1}) / max(d_i, d_{i+1})` over the
/// distinct levels; unavailable below three distinct levels.
pub fn spacing_ratios(spectrum: &EntanglementSpectrum) -> Result<SpectrumStats> {
    let distinct = spectrum.distinct_levels();
    let r_values: Vec<f64> = if distinct.len() < 3 {
        Vec::new()
    } else {
        let gaps: Vec<f64> = distinct.windows(2).map(|w| w[0] - w[1]).collect();
        gaps.windows(2).map(|g| g[0].min(g[1]) / g[0].max(g[1])).collect()
    };
    SpectrumStats::from_ratios(r_values, spectrum.degeneracy_fraction, DEFAULT_BINS)
}
