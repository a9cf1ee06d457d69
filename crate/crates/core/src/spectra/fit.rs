//! Least-squares fits: linear, base-2 exponential decay, and the entanglement
//! growth velocity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_linear(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::InvalidParameter(format!("linear fit needs >= 3 points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0) {
        return Err(Error::Degenerate("abscissae have zero variance".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    Ok(LinearFit { slope, intercept, r2 })
}

/// `D(n) = d0 * 2^{-eta n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub d0: f64,
    pub eta: f64,
    pub r2: f64,
}

/// Linear fit of `log2 D` against `n`; every `D` must be positive.
pub fn fit_exp_decay(n: &[f64], d: &[f64]) -> Result<ExpFit> {
    if let Some(bad) = d.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(format!("exponential fit needs D > 0, found {bad}")));
    }
    let logs: Vec<f64> = d.iter().map(|v| v.log2()).collect();
    let lin = fit_linear(n, &logs)?;
    Ok(ExpFit { d0: lin.intercept.exp2(), eta: -lin.slope, r2: lin.r2 })
}

/// Fraction of the saturation entropy bounding the linear growth window.
pub const GROWTH_WINDOW: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityFit {
    /// Entropy gained per unit depth in the growth window.
    pub velocity: f64,
    pub intercept: f64,
    pub r2: f64,
    pub saturation: f64,
    /// Depth where the fitted line reaches the saturation value.
    pub saturation_depth: f64,
    pub window_points: usize,
}

/// Fits `S` against depth over the leading stretch with `S < 0.8 S_inf`.
///
/// `saturation` defaults to the maximum of the curve.
pub fn entanglement_velocity(depths: &[f64], entropies: &[f64], saturation: Option<f64>) -> Result<VelocityFit> {
    if depths.len() != entropies.len() {
        return Err(Error::DimensionMismatch { expected: depths.len(), found: entropies.len() });
    }
    let s_inf = saturation.unwrap_or_else(|| entropies.iter().copied().fold(0.0, f64::max));
    if s_inf <= 1e-9 {
        return Err(Error::Degenerate("entropy never grows; no growth window".into()));
    }
    let window = entropies.iter().take_while(|&&s| s < GROWTH_WINDOW * s_inf).count();
    if window < 3 {
        return Err(Error::Degenerate(format!("growth window holds {window} points")));
    }
    let lin = fit_linear(&depths[..window], &entropies[..window])?;
    if lin.slope <= 0.0 {
        return Err(Error::Degenerate("entropy does not grow in the window".into()));
    }
    Ok(VelocityFit {
        velocity: lin.slope,
        intercept: lin.intercept,
        r2: lin.r2,
        saturation: s_inf,
        saturation_depth: (s_inf - lin.intercept) / lin.slope,
        window_points: window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 3.0).collect();
        let f = fit_linear(&x, &y).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12 && (f.intercept - 3.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_linear(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(fit_linear(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(fit_exp_decay(&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn exact_decay() {
        let n: Vec<f64> = (0..10).map(f64::from).collect();
        let d: Vec<f64> = n.iter().map(|k| 4.0 * (-0.5 * k).exp2()).collect();
        let f = fit_exp_decay(&n, &d).unwrap();
        assert!((f.d0 - 4.0).abs() < 1e-12 && (f.eta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn noisy_decay_recovers_rate() {
        let mut rng = crate::rng::rng_from_seed(21);
        let n: Vec<f64> = (0..60).map(f64::from).collect();
        let d: Vec<f64> = n
            .iter()
            .map(|k| 2.0 * (-0.3 * k).exp2() * (1.0 + 0.01 * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let f = fit_exp_decay(&n, &d).unwrap();
        assert!((f.eta - 0.3).abs() < 0.05 * 0.3, "{}", f.eta);
    }

    #[test]
    fn velocity_of_ramp() {
        let d: Vec<f64> = (0..20).map(f64::from).collect();
        let s: Vec<f64> = d.iter().map(|&x| (0.5 * x).min(5.0)).collect();
        let v = entanglement_velocity(&d, &s, None).unwrap();
        assert!((v.velocity - 0.5).abs() < 1e-12);
        assert!((v.saturation_depth - 10.0).abs() < 1e-9);
        assert!(entanglement_velocity(&d, &vec![0.0; 20], None).is_err());
    }
}
