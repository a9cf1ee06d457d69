//! Dense pure and mixed N-qubit states.
//!
//! Basis index bit `q` is the computational value of qubit `q`. Density
//! matrices are row-major; gate application treats `rho` as a `2n`-qubit
//! vector whose low `n` bits index columns and high `n` bits index rows, so
//! `U rho U^dagger` is `U` on the row qubits and `conj(U)` on the column
//! qubits, both through the same strided kernels.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gate::{apply_1q, apply_2q, check_targets, GateMatrix};
use super::linalg::{eigvalsh, max_hermitian_asymmetry};
use super::subsystem::Subsystem;
use crate::error::{Error, Result};

/// Largest register accepted for statevectors.
pub const STATEVECTOR_CAP: usize = 20;
/// Largest register accepted for density matrices.
pub const DENSITY_CAP: usize = 12;

pub const NORM_TOL: f64 = 1e-10;

/// Anything gates can be applied to.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;
    fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_cap(kind: &'static str, cap: usize, n: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { kind, cap, requested: n });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("register must hold at least one qubit".into()));
    }
    Ok(())
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_cap("statevector", STATEVECTOR_CAP, n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_cap("statevector", STATEVECTOR_CAP, n_qubits)?;
        if amps.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes `amps` before wrapping them.
    pub fn normalized(n_qubits: usize, mut amps: Vec<C64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::MIN_POSITIVE {
            return Err(Error::NotNormalized { norm });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(n_qubits, amps)
    }

    /// Tensor product of single-qubit states; `qubits[q]` is `(alpha, beta)` for qubit `q`.
    pub fn product(qubits: &[[C64; 2]]) -> Result<Self> {
        let n = qubits.len();
        check_cap("statevector", STATEVECTOR_CAP, n)?;
        let amps = (0..1usize << n)
            .map(|i| qubits.iter().enumerate().fold(C64::new(1.0, 0.0), |acc, (q, s)| acc * s[i >> q & 1]))
            .collect();
        Self::normalized(n, amps)
    }

    /// Haar-random pure state from normalized complex Gaussian amplitudes.
    pub fn haar_random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_cap("statevector", STATEVECTOR_CAP, n_qubits)?;
        let amps = (0..1usize << n_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(n_qubits, amps)
    }

    /// Product of independent Haar-random single-qubit states.
    pub fn random_product<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        let qubits: Vec<[C64; 2]> = (0..n_qubits)
            .map(|_| {
                let s = Self::haar_random(1, rng).expect("one qubit");
                [s.amps[0], s.amps[1]]
            })
            .collect();
        Self::product(&qubits)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<Z_q>`.
    pub fn expectation_z(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i >> q & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        check_cap("density matrix", DENSITY_CAP, self.n_qubits)?;
        let dim = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for (r, row) in data.chunks_exact_mut(dim).enumerate() {
            let ar = self.amps[r];
            for (x, ac) in row.iter_mut().zip(&self.amps) {
                *x = ar * ac.conj();
            }
        }
        Ok(DensityMatrix { n_qubits: self.n_qubits, data })
    }

    /// Reduced density matrix on `keep`, computed as `Psi Psi^dagger` with
    /// `Psi[a, t] = psi(a, t)`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let sub = Subsystem::new(self.n_qubits, keep)?;
        Ok(self.reduced(&sub))
    }

    pub fn reduced(&self, sub: &Subsystem) -> DensityMatrix {
        let (dk, dt) = (sub.kept_dim(), sub.traced_dim());
        let mut psi = vec![C64::new(0.0, 0.0); dk * dt];
        for a in 0..dk {
            for t in 0..dt {
                psi[a * dt + t] = self.amps[sub.full_index(a, t)];
            }
        }
        let mut data = vec![C64::new(0.0, 0.0); dk * dk];
        for a in 0..dk {
            let ra = &psi[a * dt..(a + 1) * dt];
            for b in a..dk {
                let rb = &psi[b * dt..(b + 1) * dt];
                let v: C64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
                data[a * dk + b] = v;
                data[b * dk + a] = v.conj();
            }
        }
        DensityMatrix { n_qubits: sub.kept().len(), data }
    }
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        check_targets(gate, targets, self.n_qubits)?;
        match targets {
            [q] => apply_1q(&mut self.amps, *q, gate),
            [q0, q1] => apply_2q(&mut self.amps, *q0, *q1, gate),
            _ => unreachable!("arity checked"),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        StateVector::zero(n_qubits)?.to_density()
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_cap("density matrix", DENSITY_CAP, n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_qubits, data })
    }

    /// Row-major matrix; checks shape, Hermiticity and unit trace.
    pub fn from_matrix(n_qubits: usize, data: Vec<C64>) -> Result<Self> {
        check_cap("density matrix", DENSITY_CAP, n_qubits)?;
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        let rho = Self { n_qubits, data };
        let asym = max_hermitian_asymmetry(&rho.to_matrix());
        if asym > NORM_TOL {
            return Err(Error::NonHermitian { asymmetry: asym });
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: tr });
        }
        Ok(rho)
    }

    /// Row-major entries for in-place updates that keep the state valid.
    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.data)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(&self.to_matrix())
    }

    /// Full validity check: Hermitian, unit trace, eigenvalues >= -tol.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let asym = max_hermitian_asymmetry(&self.to_matrix());
        if asym > tol {
            return Err(Error::NonHermitian { asymmetry: asym });
        }
        if (self.trace() - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm: self.trace() });
        }
        let lowest = self.eigenvalues()?[0];
        if lowest < -tol {
            return Err(Error::NegativeEigenvalue(lowest));
        }
        Ok(())
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let sub = Subsystem::new(self.n_qubits, keep)?;
        Ok(self.reduced(&sub))
    }

    /// `Tr_traced(rho)` onto the kept qubits of `sub`.
    pub fn reduced(&self, sub: &Subsystem) -> DensityMatrix {
        let d = self.dim();
        let (dk, dt) = (sub.kept_dim(), sub.traced_dim());
        let mut out = vec![C64::new(0.0, 0.0); dk * dk];
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..dt {
                    acc += self.data[sub.full_index(a, t) * d + sub.full_index(b, t)];
                }
                out[a * dk + b] = acc;
            }
        }
        DensityMatrix { n_qubits: sub.kept().len(), data: out }
    }

    /// Places `self` on the kept qubits of `sub` and `|0><0|` on the traced ones.
    pub fn embed_with_zeros(&self, sub: &Subsystem) -> Result<DensityMatrix> {
        if self.n_qubits != sub.kept().len() {
            return Err(Error::DimensionMismatch { expected: sub.kept().len(), found: self.n_qubits });
        }
        let n = sub.n_qubits();
        check_cap("density matrix", DENSITY_CAP, n)?;
        let d = 1usize << n;
        let dk = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for a in 0..dk {
            for b in 0..dk {
                data[sub.full_index(a, 0) * d + sub.full_index(b, 0)] = self.data[a * dk + b];
            }
        }
        Ok(DensityMatrix { n_qubits: n, data })
    }

    /// `self (x) other` with `other` on the high qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        check_cap("density matrix", DENSITY_CAP, n)?;
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for rb in 0..db {
            for cb in 0..db {
                let vb = other.data[rb * db + cb];
                for ra in 0..da {
                    for ca in 0..da {
                        data[(rb * da + ra) * d + cb * da + ca] = self.data[ra * da + ca] * vb;
                    }
                }
            }
        }
        Ok(DensityMatrix { n_qubits: n, data })
    }

    /// `<Z_q>` from the diagonal.
    pub fn expectation_z(&self, q: usize) -> f64 {
        let d = self.dim();
        (0..d).map(|i| if i >> q & 1 == 0 { self.data[i * d + i].re } else { -self.data[i * d + i].re }).sum()
    }

    /// Computational-basis probabilities.
    pub fn diagonal(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).collect()
    }

    pub fn sub(&self, other: &DensityMatrix) -> Result<DMatrix<C64>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.to_matrix() - other.to_matrix())
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        check_targets(gate, targets, self.n_qubits)?;
        let n = self.n_qubits;
        let conj = gate.conj();
        match targets {
            [q] => {
                apply_1q(&mut self.data, q + n, gate);
                apply_1q(&mut self.data, *q, &conj);
            }
            [q0, q1] => {
                apply_2q(&mut self.data, q0 + n, q1 + n, gate);
                apply_2q(&mut self.data, *q0, *q1, &conj);
            }
            _ => unreachable!("arity checked"),
        }
        Ok(())
    }
}

/// `1/2 sum |eig(a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let diff = a.sub(b)?;
    Ok(0.5 * eigvalsh(&diff)?.iter().map(|v| v.abs()).sum::<f64>())
}
