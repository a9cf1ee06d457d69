//! One- and two-qubit gate matrices.
//!
//! A gate acting on `targets = [t0, t1]` uses the local basis index
//! `b(t0) + 2 * b(t1)`, i.e. the first target is the least significant bit.
//! Matrices are stored row-major in a fixed 4x4 buffer; one-qubit gates only
//! use the leading 2x2 block.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum elementwise deviation of `U^dagger U` from the identity accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    m: [C64; 16],
    demand_unitary: bool,
    unitary_deviation: f64,
}

impl GateMatrix {
    /// Builds a gate from a row-major `2^arity x 2^arity` matrix.
    ///
    /// When `demand_unitary` is set, applying the gate to a state fails if the
    /// matrix is not unitary within [`UNITARY_TOL`].
    pub fn from_entries(arity: usize, entries: &[C64], demand_unitary: bool) -> Result<Self> {
        if arity != 1 && arity != 2 {
            return Err(Error::InvalidParameter(format!("gate arity {arity} not in {{1, 2}}")));
        }
        let dim = 1 << arity;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let mut m = [ZERO; 16];
        m[..dim * dim].copy_from_slice(entries);
        let mut gate = Self { arity, m, demand_unitary, unitary_deviation: 0.0 };
        gate.unitary_deviation = gate.unitarity_deviation();
        Ok(gate)
    }

    fn known(arity: usize, entries: &[C64]) -> Self {
        Self::from_entries(arity, entries, true).expect("static gate table is well formed")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.m[..self.dim() * self.dim()]
    }

    pub fn demands_unitary(&self) -> bool {
        self.demand_unitary
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_deviation <= UNITARY_TOL
    }

    /// Max elementwise |U^dagger U - I|.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.get(i, j) == ZERO))
    }

    pub fn identity(arity: usize) -> Self {
        let d = 1 << arity;
        let mut e = vec![ZERO; d * d];
        for i in 0..d {
            e[i * d + i] = ONE;
        }
        Self::known(arity, &e)
    }

    pub fn x() -> Self {
        Self::known(1, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Self {
        Self::known(1, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> Self {
        Self::known(1, &[ONE, ZERO, ZERO, -ONE])
    }

    pub fn h() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::known(1, &[h, h, h, -h])
    }

    pub fn s() -> Self {
        Self::known(1, &[ONE, ZERO, ZERO, I])
    }

    pub fn t() -> Self {
        Self::known(1, &[ONE, ZERO, ZERO, C64::from_polar(1.0, FRAC_PI_4)])
    }

    /// Y rotation `exp(-i Y theta / 2)`.
    pub fn ry(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self::known(1, &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)])
    }

    /// Controlled-X with control `targets[0]` and target `targets[1]`.
    pub fn cx() -> Self {
        // local index b0 + 2 b1; flips b1 when b0 = 1: |1> <-> |3>
        let mut e = [ZERO; 16];
        e[0] = ONE;
        e[4 + 3] = ONE;
        e[2 * 4 + 2] = ONE;
        e[3 * 4 + 1] = ONE;
        Self::known(2, &e)
    }

    /// Conditional-T: phase `e^{i pi/4}` on `|11>`, identity elsewhere.
    pub fn ct() -> Self {
        let mut e = [ZERO; 16];
        e[0] = ONE;
        e[5] = ONE;
        e[10] = ONE;
        e[15] = C64::from_polar(1.0, FRAC_PI_4);
        Self::known(2, &e)
    }

    pub fn swap() -> Self {
        let mut e = [ZERO; 16];
        e[0] = ONE;
        e[4 + 2] = ONE;
        e[2 * 4 + 1] = ONE;
        e[15] = ONE;
        Self::known(2, &e)
    }

    /// Two-qubit product `first (x) second`, with `first` acting on `targets[0]`.
    pub fn kron(first: &GateMatrix, second: &GateMatrix) -> Result<Self> {
        if first.arity != 1 || second.arity != 1 {
            return Err(Error::InvalidParameter("kron expects two one-qubit gates".into()));
        }
        let mut e = [ZERO; 16];
        for r1 in 0..2 {
            for r0 in 0..2 {
                for c1 in 0..2 {
                    for c0 in 0..2 {
                        e[(r0 + 2 * r1) * 4 + (c0 + 2 * c1)] = first.get(r0, c0) * second.get(r1, c1);
                    }
                }
            }
        }
        Ok(Self::from_entries(2, &e, first.demand_unitary || second.demand_unitary)?)
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn matmul(&self, rhs: &GateMatrix) -> Result<Self> {
        if self.arity != rhs.arity {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rhs.dim() });
        }
        let d = self.dim();
        let mut e = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                e[i * d + j] = acc;
            }
        }
        Self::from_entries(self.arity, &e, self.demand_unitary && rhs.demand_unitary)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut e = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                e[i * d + j] = self.get(j, i).conj();
            }
        }
        Self::from_entries(self.arity, &e, self.demand_unitary).expect("same shape")
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = *self;
        for v in out.m.iter_mut() {
            *v = v.conj();
        }
        out
    }
}

/// `U |psi>` restricted to one qubit, in place on a `2^n` amplitude buffer.
pub(crate) fn apply_1q(amps: &mut [C64], q: usize, g: &GateMatrix) {
    let stride = 1usize << q;
    let (m00, m01, m10, m11) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    if g.is_diagonal() {
        for (i, a) in amps.iter_mut().enumerate() {
            *a *= if i & stride == 0 { m00 } else { m11 };
        }
        return;
    }
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a0, *a1);
            *a0 = m00 * x0 + m01 * x1;
            *a1 = m10 * x0 + m11 * x1;
        }
    }
}

/// Inserts zero bits at positions `lo < hi` into `i`.
#[inline]
fn insert_two_zero_bits(i: usize, lo: usize, hi: usize) -> usize {
    let lo_mask = (1usize << lo) - 1;
    let x = (i & lo_mask) | ((i & !lo_mask) << 1);
    let hi_mask = (1usize << hi) - 1;
    (x & hi_mask) | ((x & !hi_mask) << 1)
}

/// `U |psi>` on qubits `(q0, q1)`, in place on a `2^n` amplitude buffer.
pub(crate) fn apply_2q(amps: &mut [C64], q0: usize, q1: usize, g: &GateMatrix) {
    let (b0, b1) = (1usize << q0, 1usize << q1);
    let (lo, hi) = if q0 < q1 { (q0, q1) } else { (q1, q0) };
    let quarter = amps.len() >> 2;
    if g.is_diagonal() {
        let d = [g.get(0, 0), g.get(1, 1), g.get(2, 2), g.get(3, 3)];
        for (i, a) in amps.iter_mut().enumerate() {
            let k = usize::from(i & b0 != 0) + 2 * usize::from(i & b1 != 0);
            *a *= d[k];
        }
        return;
    }
    let m = g.entries();
    for i in 0..quarter {
        let base = insert_two_zero_bits(i, lo, hi);
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &target) in idx.iter().enumerate() {
            let row = &m[4 * r..4 * r + 4];
            amps[target] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

/// Validates targets against a register size and the gate arity.
pub(crate) fn check_targets(gate: &GateMatrix, targets: &[usize], n_qubits: usize) -> Result<()> {
    if targets.len() != gate.arity() {
        return Err(Error::DimensionMismatch { expected: gate.arity(), found: targets.len() });
    }
    let bad_range = targets.iter().any(|&t| t >= n_qubits);
    let dup = targets.len() == 2 && targets[0] == targets[1];
    if bad_range || dup {
        return Err(Error::InvalidTargets { targets: targets.to_vec(), n_qubits });
    }
    if gate.demands_unitary() && !gate.is_unitary() {
        return Err(Error::NonUnitary { deviation: gate.unitarity_deviation() });
    }
    Ok(())
}
