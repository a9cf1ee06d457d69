//! One iteration of the reservoir map
//! `rho -> Tr_R(U rho U^dagger) (x) |0><0|_R` with `U = U_res (R_Y(theta) on M)`.
//!
//! Because the readout half is reset every step, the state is always
//! `sigma (x) |0><0|_R` and only the memory block `sigma` is carried. The
//! fast route stores the fixed part of the channel as a real superoperator on
//! the Hermitian coordinates of `sigma` (diagonal entries, then real and
//! imaginary parts of the strict upper triangle), so one step is a single
//! dense real matrix-vector product after the cheap encoding rotations.

use nalgebra::{DMatrix, DVector};

use crate::circuit::{encoding_layer, CircuitTemplate};
use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, QuantumState, StateVector, Subsystem, C64};

use super::config::ReservoirConfig;

/// Largest tolerated `|Tr rho - 1|` before a trajectory is aborted.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

/// `<prod_{q in obs} Z_q>` for each observable, from basis probabilities.
pub fn z_features(probs: &[f64], observables: &[Vec<usize>]) -> Vec<f64> {
    observables
        .iter()
        .map(|obs| {
            let mask = obs.iter().fold(0usize, |m, &q| m | 1 << q);
            probs.iter().enumerate().map(|(x, &p)| if (x & mask).count_ones() % 2 == 0 { p } else { -p }).sum()
        })
        .collect()
}

/// Reference step on the full density matrix. Returns the next state and the
/// feature row (observables followed by a bias `1`).
pub fn step(
    rho: &DensityMatrix,
    theta: f64,
    cfg: &ReservoirConfig,
    template: &CircuitTemplate,
    n: usize,
) -> Result<(DensityMatrix, Vec<f64>)> {
    let split = cfg.split()?;
    let mut evolved = rho.clone();
    for (g, q) in encoding_layer(theta, split.kept()) {
        evolved.apply_gate(&g, &[q])?;
    }
    template.apply(&mut evolved)?;
    let mut features = z_features(&evolved.diagonal(), &cfg.observables());
    features.push(1.0);
    let next = evolved.reduced(&split).embed_with_zeros(&split)?;
    let tr = next.trace();
    if (tr - 1.0).abs() > TRACE_DRIFT_TOL {
        return Err(Error::TraceDrift { step: n, trace: tr });
    }
    Ok((next, features))
}

/// Index bookkeeping for the Hermitian coordinates of a `dim x dim` matrix.
#[derive(Clone, Debug)]
struct HermitianCoords {
    dim: usize,
    /// `pair_base[a] + (b - a - 1)` indexes pair `a < b` among the off-diagonals.
    pair_base: Vec<usize>,
}

impl HermitianCoords {
    fn new(dim: usize) -> Self {
        let mut pair_base = Vec::with_capacity(dim);
        let mut acc = 0;
        for a in 0..dim {
            pair_base.push(acc);
            acc += dim - a - 1;
        }
        Self { dim, pair_base }
    }

    fn len(&self) -> usize {
        self.dim * self.dim
    }

    /// Coordinate of `Re rho_ab` for `a < b`; the imaginary part follows it.
    #[inline]
    fn re(&self, a: usize, b: usize) -> usize {
        self.dim + 2 * (self.pair_base[a] + b - a - 1)
    }

    fn encode(&self, rho: &[C64], out: &mut DVector<f64>) {
        let d = self.dim;
        for a in 0..d {
            out[a] = rho[a * d + a].re;
            for b in a + 1..d {
                let k = self.re(a, b);
                out[k] = rho[a * d + b].re;
                out[k + 1] = rho[a * d + b].im;
            }
        }
    }

    fn decode(&self, x: &DVector<f64>, rho: &mut [C64]) {
        let d = self.dim;
        for a in 0..d {
            rho[a * d + a] = C64::new(x[a], 0.0);
            for b in a + 1..d {
                let k = self.re(a, b);
                let z = C64::new(x[k], x[k + 1]);
                rho[a * d + b] = z;
                rho[b * d + a] = z.conj();
            }
        }
    }

    /// Writes the coordinates of the Hermitian matrix `h` into column `col`.
    fn write_column(&self, h: &DMatrix<C64>, s: &mut DMatrix<f64>, col: usize) {
        let d = self.dim;
        for c in 0..d {
            s[(c, col)] = h[(c, c)].re;
            for e in c + 1..d {
                let k = self.re(c, e);
                s[(k, col)] = h[(c, e)].re;
                s[(k + 1, col)] = h[(c, e)].im;
            }
        }
    }
}

/// Fast reservoir map for a fixed configuration and circuit draw.
#[derive(Clone, Debug)]
pub struct ReservoirChannel {
    n_memory: usize,
    coords: HermitianCoords,
    superop: DMatrix<f64>,
    /// Feature functionals on the coordinates of the encoded memory state.
    readout: DMatrix<f64>,
    scratch_in: DVector<f64>,
    scratch_out: DVector<f64>,
}

impl ReservoirChannel {
    pub fn new(cfg: &ReservoirConfig, template: &CircuitTemplate) -> Result<Self> {
        cfg.validate()?;
        if template.n_qubits() != cfg.n_qubits {
            return Err(Error::DimensionMismatch { expected: cfg.n_qubits, found: template.n_qubits() });
        }
        let split = cfg.split()?;
        let (dm, dr) = (split.kept_dim(), split.traced_dim());
        let columns = isometry_columns(&split, template)?;
        let coords = HermitianCoords::new(dm);
        let nc = coords.len();

        let mut superop = DMatrix::<f64>::zeros(nc, nc);
        for a in 0..dm {
            for b in a..dm {
                // sum_r K_r |a><b| K_r^dagger
                let c = &columns[a] * columns[b].adjoint();
                if a == b {
                    coords.write_column(&c, &mut superop, a);
                } else {
                    let herm = &c + c.adjoint();
                    let anti = (&c - c.adjoint()) * C64::new(0.0, 1.0);
                    let k = coords.re(a, b);
                    coords.write_column(&herm, &mut superop, k);
                    coords.write_column(&anti, &mut superop, k + 1);
                }
            }
        }

        // Joint basis probabilities before reset, as functionals of the
        // encoded memory coordinates, folded into the Z-parity observables.
        let observables = cfg.observables();
        let masks: Vec<usize> = observables.iter().map(|o| o.iter().fold(0, |m, &q| m | 1 << q)).collect();
        let mut readout = DMatrix::<f64>::zeros(masks.len(), nc);
        for m in 0..dm {
            for r in 0..dr {
                let x = split.full_index(m, r);
                let signs: Vec<f64> =
                    masks.iter().map(|&mask| if (x & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect();
                let mut add = |coord: usize, value: f64| {
                    for (k, s) in signs.iter().enumerate() {
                        readout[(k, coord)] += s * value;
                    }
                };
                for a in 0..dm {
                    let va = columns[a][(m, r)];
                    add(a, va.norm_sqr());
                    for b in a + 1..dm {
                        let z = va * columns[b][(m, r)].conj();
                        let k = coords.re(a, b);
                        add(k, 2.0 * z.re);
                        add(k + 1, -2.0 * z.im);
                    }
                }
            }
        }

        Ok(Self {
            n_memory: split.kept().len(),
            coords,
            superop,
            readout,
            scratch_in: DVector::zeros(nc),
            scratch_out: DVector::zeros(nc),
        })
    }

    /// Number of feature columns including the bias.
    pub fn n_features(&self) -> usize {
        self.readout.nrows() + 1
    }

    pub fn n_memory(&self) -> usize {
        self.n_memory
    }

    /// Advances `sigma` (the memory block) by one input and returns the
    /// feature row measured before the reset.
    pub fn step(&mut self, sigma: &mut DensityMatrix, theta: f64, n: usize) -> Result<Vec<f64>> {
        let mut features = vec![0.0; self.n_features()];
        self.step_into(sigma, theta, n, &mut features)?;
        Ok(features)
    }

    pub fn step_into(&mut self, sigma: &mut DensityMatrix, theta: f64, n: usize, features: &mut [f64]) -> Result<()> {
        if sigma.n_qubits() != self.n_memory {
            return Err(Error::DimensionMismatch { expected: self.n_memory, found: sigma.n_qubits() });
        }
        let local: Vec<usize> = (0..self.n_memory).collect();
        for (g, q) in encoding_layer(theta, &local) {
            sigma.apply_gate(&g, &[q])?;
        }
        self.coords.encode(sigma.data(), &mut self.scratch_in);
        let k = self.readout.nrows();
        for (i, f) in features[..k].iter_mut().enumerate() {
            *f = self.readout.row(i).dot(&self.scratch_in.transpose());
        }
        features[k] = 1.0;
        self.scratch_out.gemv(1.0, &self.superop, &self.scratch_in, 0.0);
        self.coords.decode(&self.scratch_out, sigma.data_mut());
        let tr = sigma.trace();
        if (tr - 1.0).abs() > TRACE_DRIFT_TOL {
            return Err(Error::TraceDrift { step: n, trace: tr });
        }
        Ok(())
    }
}

/// `V[:, a]` reshaped to `(memory, readout)` for every memory basis input `a`,
/// where `V = U_res (I_M (x) |0>_R)`.
fn isometry_columns(split: &Subsystem, template: &CircuitTemplate) -> Result<Vec<DMatrix<C64>>> {
    let n = split.n_qubits();
    let (dm, dr) = (split.kept_dim(), split.traced_dim());
    (0..dm)
        .map(|a| {
            let mut psi = StateVector::basis(n, split.full_index(a, 0))?;
            template.apply(&mut psi)?;
            let amps = psi.amplitudes();
            Ok(DMatrix::from_fn(dm, dr, |m, r| amps[split.full_index(m, r)]))
        })
        .collect()
}
