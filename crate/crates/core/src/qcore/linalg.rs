//! Hermitian eigendecomposition and related helpers.
//!
//! Backed by faer's self-adjoint eigensolver (Householder tridiagonalization
//! followed by a divide-and-conquer / implicit QR stage). nalgebra's
//! `SymmetricEigen` was dropped because its complex QR sweep returns NaN on
//! sparse rank-one projectors, which stabilizer states produce routinely.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Max elementwise `|A_ij - conj(A_ji)|` tolerated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-8;

pub fn max_hermitian_asymmetry(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn to_faer(a: &DMatrix<C64>) -> Result<Mat<C64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    let asym = max_hermitian_asymmetry(a);
    if asym > HERMITIAN_TOL {
        return Err(Error::NonHermitian { asymmetry: asym });
    }
    Ok(Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]))
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("Hermitian eigensolver returned a non-finite eigenvalue".into()));
    }
    Ok(())
}

/// Eigenvalues in ascending order and the matching unitary eigenvector matrix
/// (eigenvectors are columns), so that `A = V diag(lambda) V^dagger`.
pub fn eigh(a: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let m = to_faer(a)?;
    let eig = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver failed: {e:?}")))?;
    let n = a.nrows();
    let s = eig.S();
    let u = eig.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let values: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
    check_finite(&values)?;
    let vectors = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &DMatrix<C64>) -> Result<Vec<f64>> {
    let m = to_faer(a)?;
    let mut values: Vec<f64> = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver failed: {e:?}")))?;
    values.sort_by(f64::total_cmp);
    check_finite(&values)?;
    Ok(values)
}
