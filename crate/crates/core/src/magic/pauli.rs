//! Pauli-basis coefficients `c_P = Tr(rho P)` by a per-qubit butterfly.
//!
//! The density matrix is viewed as a `2n`-bit array where column bit `k`
//! and row bit `n + k` together index the 2x2 block of qubit `k`. One
//! in-place pass per qubit maps `(rho00, rho01, rho10, rho11)` to
//! `(I, X, Y, Z)` coefficients, for `O(n 4^n)` work overall.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::DensityMatrix;

/// Default register cap for the Pauli transform.
pub const PAULI_CAP: usize = 12;

/// Coefficients indexed by base-4 strings: digit `k` (0=I, 1=X, 2=Y, 3=Z) is
/// the Pauli on qubit `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSpectrum {
    n_qubits: usize,
    coefficients: Vec<f64>,
}

impl PauliSpectrum {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient for per-qubit digits `digits[k]`.
    pub fn coefficient(&self, digits: &[u8]) -> f64 {
        let idx = digits.iter().rev().fold(0usize, |acc, &d| acc * 4 + d as usize);
        self.coefficients[idx]
    }

    /// `2^{-n} sum c_P^2 = Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>() / (1u64 << self.n_qubits) as f64
    }

    /// `sum c_P^4`.
    pub fn fourth_power_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| (c * c) * (c * c)).sum()
    }
}

/// Spreads the bits of `x` to even positions.
fn spread_bits(x: usize) -> usize {
    let mut out = 0usize;
    let mut k = 0;
    let mut v = x;
    while v != 0 {
        out |= (v & 1) << (2 * k);
        v >>= 1;
        k += 1;
    }
    out
}

pub fn pauli_transform(rho: &DensityMatrix) -> Result<PauliSpectrum> {
    pauli_transform_capped(rho, PAULI_CAP)
}

pub fn pauli_transform_capped(rho: &DensityMatrix, cap: usize) -> Result<PauliSpectrum> {
    let n = crate::qcore::QuantumState::n_qubits(rho);
    if n > cap {
        return Err(Error::CapExceeded { kind: "Pauli transform", cap, requested: n });
    }
    let mut buf: Vec<C64> = rho.data().to_vec();
    let i_unit = C64::new(0.0, 1.0);
    for k in 0..n {
        let cb = 1usize << k;
        let rb = 1usize << (n + k);
        for i in 0..buf.len() {
            if i & (cb | rb) != 0 {
                continue;
            }
            let (a, b, c, d) = (buf[i], buf[i | cb], buf[i | rb], buf[i | cb | rb]);
            buf[i] = a + d;
            buf[i | cb] = b + c;
            buf[i | rb] = i_unit * (b - c);
            buf[i | cb | rb] = a - d;
        }
    }
    let dim = rho.dim();
    let spread: Vec<usize> = (0..dim).map(spread_bits).collect();
    let mut coefficients = vec![0.0; buf.len()];
    for r in 0..dim {
        let row = spread[r] << 1;
        for c in 0..dim {
            coefficients[row | spread[c]] = buf[r * dim + c].re;
        }
    }
    Ok(PauliSpectrum { n_qubits: n, coefficients })
}
