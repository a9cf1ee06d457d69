use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Post-washout feature rows; the last column is the constant bias.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    /// Trajectory step of each row.
    pub steps: Vec<usize>,
    pub data: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.data.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }
}

/// Column means and standard deviations frozen from the training rows.
/// Zero-variance columns map to 0; the bias column passes through.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(train: &DMatrix<f64>) -> Self {
        let rows = train.nrows() as f64;
        let last = train.ncols() - 1;
        let mut means = Vec::with_capacity(train.ncols());
        let mut stds = Vec::with_capacity(train.ncols());
        for (j, col) in train.column_iter().enumerate() {
            if j == last {
                means.push(0.0);
                stds.push(1.0);
                continue;
            }
            let m = col.sum() / rows;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / rows;
            means.push(m);
            stds.push(var.sqrt());
        }
        Self { means, stds }
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            let (m, s) = (self.means[j], self.stds[j]);
            // relative threshold: columns constant up to rounding count as constant
            let constant = s <= 1e-12 * m.abs().max(1e-300);
            for v in col.iter_mut() {
                *v = if constant { 0.0 } else { (*v - m) / s };
            }
        }
        let last = out.ncols() - 1;
        out.column_mut(last).fill(1.0);
        out
    }
}

/// Linear readout trained on standardized features.
#[derive(Clone, Debug, PartialEq)]
pub struct Readout {
    pub standardizer: Standardizer,
    pub weights: Vec<f64>,
    /// Set when the normal equations fell back to the pseudoinverse.
    pub used_pseudoinverse: bool,
}

impl Readout {
    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let w = DVector::from_column_slice(&self.weights);
        (self.standardizer.apply(x) * w).iter().copied().collect()
    }
}

/// Held-out evaluation of a fitted readout.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutFit {
    pub readout: Readout,
    pub train_rows: usize,
    pub test_targets: Vec<f64>,
    pub predictions: Vec<f64>,
    pub capacity: f64,
    pub nmse: f64,
}

/// `cov(y, yhat)^2 / (var(y) var(yhat))`; 0 if either variance vanishes.
pub fn capacity(y: &[f64], yhat: &[f64]) -> f64 {
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let mh = yhat.iter().sum::<f64>() / n;
    let (mut cov, mut vy, mut vh) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(yhat) {
        cov += (a - my) * (b - mh);
        vy += (a - my) * (a - my);
        vh += (b - mh) * (b - mh);
    }
    if vy <= 0.0 || vh <= 1e-30 * vy {
        return 0.0;
    }
    (cov * cov / (vy * vh)).clamp(0.0, 1.0)
}

/// Mean squared error over the target variance.
pub fn nmse(y: &[f64], yhat: &[f64]) -> f64 {
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - my) * (v - my)).sum::<f64>() / n;
    let mse = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
    if var > 0.0 {
        mse / var
    } else {
        f64::INFINITY
    }
}

/// Ridge solution of `(X^T X + lambda P) w = X^T y` with the bias column left
/// unpenalized. Falls back to the SVD pseudoinverse when the system is not
/// positive definite.
pub fn ridge(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> (DVector<f64>, bool) {
    let mut gram = x.transpose() * x;
    let last = gram.ncols() - 1;
    for j in 0..last {
        gram[(j, j)] += lambda;
    }
    let rhs = x.transpose() * y;
    if lambda > 0.0 {
        if let Some(ch) = gram.clone().cholesky() {
            return (ch.solve(&rhs), false);
        }
    }
    warn!("normal equations singular at lambda = {lambda:e}; using pseudoinverse");
    let svd = gram.svd(true, true);
    let w = svd.solve(&rhs, 1e-12 * svd.singular_values.max()).expect("both factors computed");
    (w, true)
}

/// Fits a ridge readout on the leading `train_fraction` of the rows and
/// scores it on the remaining contiguous block.
pub fn fit_readout(features: &FeatureMatrix, targets: &[f64], lambda: f64, train_fraction: f64) -> Result<ReadoutFit> {
    let rows = features.n_rows();
    if targets.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, found: targets.len() });
    }
    let train = (rows as f64 * train_fraction).round() as usize;
    if train < 2 || train >= rows {
        return Err(Error::InvalidParameter(format!("split leaves {train} training rows of {rows}")));
    }
    let cols = features.n_features();
    if train < 2 * cols {
        warn!("only {train} training rows for {cols} features");
    }
    let x_train = features.data.rows(0, train).into_owned();
    let x_test = features.data.rows(train, rows - train).into_owned();
    let standardizer = Standardizer::fit(&x_train);
    let (w, used_pseudoinverse) =
        ridge(&standardizer.apply(&x_train), &DVector::from_column_slice(&targets[..train]), lambda);
    let readout = Readout { standardizer, weights: w.iter().copied().collect(), used_pseudoinverse };
    let predictions = readout.predict(&x_test);
    let test_targets = targets[train..].to_vec();
    Ok(ReadoutFit {
        capacity: capacity(&test_targets, &predictions),
        nmse: nmse(&test_targets, &predictions),
        readout,
        train_rows: train,
        test_targets,
        predictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn random_features(rows: usize, cols: usize, seed: u64) -> FeatureMatrix {
        let mut rng = rng_from_seed(seed);
        let data = DMatrix::from_fn(rows, cols, |_, j| if j == cols - 1 { 1.0 } else { rng.random::<f64>() });
        FeatureMatrix { names: (0..cols).map(|j| format!("f{j}")).collect(), steps: (0..rows).collect(), data }
    }

    #[test]
    fn realizable_target_is_recovered() {
        let f = random_features(500, 8, 1);
        let y: Vec<f64> = (0..500).map(|i| 3.0 * f.data[(i, 0)] - 2.0 * f.data[(i, 4)] + 0.5).collect();
        let fit = fit_readout(&f, &y, 1e-12, 0.7).unwrap();
        assert!(fit.capacity > 0.999, "{}", fit.capacity);
        assert!(fit.nmse < 1e-6);
    }

    #[test]
    fn noise_target_has_no_capacity() {
        let f = random_features(1500, 16, 2);
        let mut rng = rng_from_seed(3);
        let y: Vec<f64> = (0..1500).map(|_| rng.random::<f64>()).collect();
        let fit = fit_readout(&f, &y, 1e-8, 0.7).unwrap();
        assert!(fit.capacity < 0.05, "{}", fit.capacity);
    }

    #[test]
    fn training_columns_are_standardized() {
        let f = random_features(300, 5, 4);
        let x = f.data.rows(0, 210).into_owned();
        let z = Standardizer::fit(&x).apply(&x);
        for j in 0..4 {
            let col = z.column(j);
            let m = col.sum() / 210.0;
            let s = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 210.0).sqrt();
            assert!(m.abs() < 1e-8 && (s - 1.0).abs() < 1e-8);
        }
        assert!(z.column(4).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn constant_column_and_zero_lambda() {
        let mut f = random_features(200, 4, 5);
        f.data.column_mut(1).fill(0.25);
        let y: Vec<f64> = (0..200).map(|i| f.data[(i, 0)]).collect();
        let fit = fit_readout(&f, &y, 0.0, 0.7).unwrap();
        assert!(fit.readout.used_pseudoinverse);
        assert!(fit.capacity > 0.999);
    }

    #[test]
    fn capacity_edge_cases() {
        assert_eq!(capacity(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), 0.0);
        assert!((capacity(&[1.0, 2.0, 3.0], &[-2.0, -4.0, -6.0]) - 1.0).abs() < 1e-15);
        let f = random_features(10, 3, 1);
        assert!(fit_readout(&f, &[0.0; 9], 1e-8, 0.7).is_err());
    }
}
