//! GUE and Poisson surmises for spacing ratios on `[0, 1]`, and the relative
//! entropy of an empirical ratio histogram against the GUE law.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 50;
/// Mean ratio of the Poisson surmise, `2 ln 2 - 1`.
pub const POISSON_MEAN_R: f64 = 0.386_294_361_119_890_6;

const QUAD_TOL: f64 = 1e-12;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

fn gue_unnormalized(r: f64) -> f64 {
    let s = r + r * r;
    s * s / (1.0 + s).powi(4)
}

/// Normalization of the GUE surmise on `[0, 1]`.
pub fn gue_normalization() -> f64 {
    static Z: OnceLock<f64> = OnceLock::new();
    *Z.get_or_init(|| adaptive_simpson(&gue_unnormalized, 0.0, 1.0, QUAD_TOL))
}

/// `Z^{-1} (r + r^2)^2 / (1 + r + r^2)^4` on `[0, 1]`, zero outside.
pub fn gue_surmise_pdf(r: f64) -> f64 {
    if !(0.0..=1.0).contains(&r) {
        return 0.0;
    }
    gue_unnormalized(r) / gue_normalization()
}

/// `2 / (1 + r)^2` on `[0, 1]`, the Poisson-level reference.
pub fn poisson_surmise_pdf(r: f64) -> f64 {
    if !(0.0..=1.0).contains(&r) {
        return 0.0;
    }
    2.0 / ((1.0 + r) * (1.0 + r))
}

pub fn gue_mean_r() -> f64 {
    adaptive_simpson(&|r| r * gue_surmise_pdf(r), 0.0, 1.0, QUAD_TOL)
}

/// Surmise probability mass in each of `bins` uniform bins on `[0, 1]`.
pub fn gue_bin_masses(bins: usize) -> Vec<f64> {
    let w = 1.0 / bins as f64;
    (0..bins).map(|k| adaptive_simpson(&gue_surmise_pdf, k as f64 * w, (k + 1) as f64 * w, QUAD_TOL)).collect()
}

fn bin_counts(r_values: &[f64], bins: usize) -> Result<Vec<usize>> {
    if r_values.is_empty() {
        return Err(Error::InvalidParameter("no spacing ratios".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("zero histogram bins".into()));
    }
    let mut counts = vec![0usize; bins];
    for &r in r_values {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!("ratio {r} outside [0, 1]")));
        }
        counts[((r * bins as f64) as usize).min(bins - 1)] += 1;
    }
    Ok(counts)
}

/// `sum_k Q_k log2(Q_k / G_k)` where `Q` is the histogram of `r_values` with a
/// pseudocount of one per bin and `G` the bin-integrated GUE surmise.
pub fn kl_to_gue(r_values: &[f64], bins: usize) -> Result<f64> {
    let counts = bin_counts(r_values, bins)?;
    let total = (r_values.len() + bins) as f64;
    let kl = counts
        .iter()
        .zip(gue_bin_masses(bins))
        .map(|(&c, g)| {
            let q = (c as f64 + 1.0) / total;
            q * (q / g).log2()
        })
        .sum::<f64>();
    Ok(kl.max(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub r_bin_center: f64,
    pub empirical_density: f64,
    pub surmise_density: f64,
}

/// Plot-ready ratio histogram (no pseudocount) next to the bin-averaged surmise.
pub fn ratio_histogram(r_values: &[f64], bins: usize) -> Result<Vec<HistogramRow>> {
    let counts = bin_counts(r_values, bins)?;
    let w = 1.0 / bins as f64;
    let n = r_values.len() as f64;
    Ok(counts
        .iter()
        .zip(gue_bin_masses(bins))
        .enumerate()
        .map(|(k, (&c, g))| HistogramRow {
            r_bin_center: (k as f64 + 0.5) * w,
            empirical_density: c as f64 / (n * w),
            surmise_density: g / w,
        })
        .collect())
}
