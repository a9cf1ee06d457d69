//! Second stabilizer Renyi entropy, mutual magic and anti-flatness.

use serde::{Deserialize, Serialize};

use super::pauli::pauli_transform;
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, StateVector, Subsystem};

/// Purity below which the SRE is not evaluated.
const MIN_PURITY: f64 = 1e-14;

/// `M(rho) = -log2(2^{-n} sum_P Tr(rho P)^4) - S_2(rho)`.
pub fn sre2(rho: &DensityMatrix) -> Result<f64> {
    let ps = pauli_transform(rho)?;
    let purity = ps.purity();
    if purity < MIN_PURITY {
        return Err(Error::Degenerate(format!("purity {purity:.3e} is numerically zero")));
    }
    let n = ps.n_qubits() as i32;
    let moment = ps.fourth_power_sum() * 2f64.powi(-n);
    Ok(-moment.log2() + purity.log2())
}

/// SRE of a pure state (the `S_2 = 0` branch).
pub fn sre2_pure(psi: &StateVector) -> Result<f64> {
    sre2(&psi.to_density()?)
}

/// `Tr rho^3 - (Tr rho^2)^2` from a spectrum.
pub fn anti_flatness_from_eigenvalues(eigs: &[f64]) -> f64 {
    let p2: f64 = eigs.iter().map(|l| l * l).sum();
    let p3: f64 = eigs.iter().map(|l| l * l * l).sum();
    p3 - p2 * p2
}

/// Anti-flatness of the reduced state of a pure `psi` on the cut `sub`.
///
/// The eigenvalues are taken on the smaller side; the nonzero spectra agree.
pub fn anti_flatness(psi: &StateVector, sub: &Subsystem) -> Result<f64> {
    let side = if sub.kept().len() * 2 <= sub.n_qubits() { sub.clone() } else { sub.complement() };
    Ok(anti_flatness_from_eigenvalues(&psi.reduced(&side).eigenvalues()?))
}

/// Relative gap `|I - I_ref| / I_ref`; values above one are reported, not clipped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeGap {
    pub value: f64,
    pub exceeds_one: bool,
}

pub fn relative_gap(mutual: f64, haar_reference: f64) -> Result<RelativeGap> {
    if !(haar_reference > 0.0) {
        return Err(Error::InvalidParameter(format!("Haar reference {haar_reference} must be positive")));
    }
    let value = (mutual - haar_reference).abs() / haar_reference;
    Ok(RelativeGap { value, exceeds_one: value > 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagicReport {
    pub total_magic: f64,
    pub magic_m: f64,
    pub magic_r: f64,
    pub mutual_magic: f64,
    pub anti_flatness: f64,
    pub relative_gap: Option<RelativeGap>,
}

impl MagicReport {
    pub fn with_reference(mut self, haar_mutual: f64) -> Result<Self> {
        self.relative_gap = Some(relative_gap(self.mutual_magic, haar_reference_guard(haar_mutual)?)?);
        Ok(self)
    }
}

fn haar_reference_guard(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter("non-finite Haar reference".into()))
    }
}

/// Total, subsystem and mutual magic plus anti-flatness for a pure state.
///
/// `cut` selects `M`; its complement is `R`. Without a cut the register is
/// split in equal halves, which requires even `N`.
pub fn mutual_magic(psi: &StateVector, cut: Option<&Subsystem>) -> Result<MagicReport> {
    use crate::qcore::QuantumState;
    let n = psi.n_qubits();
    let owned;
    let sub = match cut {
        Some(s) => {
            if s.n_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.n_qubits() });
            }
            s
        }
        None => {
            if n % 2 != 0 {
                return Err(Error::InvalidSubsystem(format!("odd N = {n} needs an explicit cut")));
            }
            owned = Subsystem::first_half(n)?;
            &owned
        }
    };
    let total_magic = sre2_pure(psi)?;
    let rho_m = psi.reduced(sub);
    let rho_r = psi.reduced(&sub.complement());
    let magic_m = sre2(&rho_m)?;
    let magic_r = sre2(&rho_r)?;
    let small = if rho_m.dim() <= rho_r.dim() { &rho_m } else { &rho_r };
    let anti_flatness = anti_flatness_from_eigenvalues(&small.eigenvalues()?);
    Ok(MagicReport {
        total_magic,
        magic_m,
        magic_r,
        mutual_magic: total_magic - magic_m - magic_r,
        anti_flatness,
        relative_gap: None,
    })
}
