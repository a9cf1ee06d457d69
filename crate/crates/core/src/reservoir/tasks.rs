use log::{debug, warn};
use nalgebra::DMatrix;
use rand::Rng;

use crate::circuit::CircuitTemplate;
use crate::error::{Error, Result};
use crate::qcore::{trace_distance, DensityMatrix};
use crate::spectra::{fit_exp_decay, ExpFit};

use super::channel::ReservoirChannel;
use super::config::ReservoirConfig;
use super::readout::{fit_readout, FeatureMatrix};

/// Delays averaged into the mean memory capacity.
pub const MEAN_TAU_RANGE: std::ops::RangeInclusive<usize> = 1..=12;
/// Trace distances at or below this are rounding noise and skipped in fits.
pub const DISTANCE_FLOOR: f64 = 1e-12;
pub const NARMA_ORDER: usize = 10;

/// Drives the reservoir from `|0...0>` with one input per step and keeps
/// the feature rows after the washout.
pub fn run_sequence(cfg: &ReservoirConfig, template: &CircuitTemplate, inputs: &[f64]) -> Result<FeatureMatrix> {
    let mut chan = ReservoirChannel::new(cfg, template)?;
    let sigma = DensityMatrix::zero_state(chan.n_memory())?;
    run_from(&mut chan, sigma, cfg, inputs)
}

pub(crate) fn run_from(
    chan: &mut ReservoirChannel,
    mut sigma: DensityMatrix,
    cfg: &ReservoirConfig,
    inputs: &[f64],
) -> Result<FeatureMatrix> {
    if inputs.len() <= cfg.washout {
        return Err(Error::InvalidParameter(format!(
            "{} inputs leave no rows after a washout of {}",
            inputs.len(),
            cfg.washout
        )));
    }
    let rows = inputs.len() - cfg.washout;
    let cols = chan.n_features();
    let mut data = DMatrix::<f64>::zeros(rows, cols);
    let mut row = vec![0.0; cols];
    for (n, &theta) in inputs.iter().enumerate() {
        chan.step_into(&mut sigma, theta, n, &mut row)?;
        if n >= cfg.washout {
            for (j, v) in row.iter().enumerate() {
                data[(n - cfg.washout, j)] = *v;
            }
        }
    }
    Ok(FeatureMatrix { names: cfg.feature_names(), steps: (cfg.washout..inputs.len()).collect(), data })
}

/// Outcome of one benchmark trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskRun {
    pub inputs: Vec<f64>,
    /// Test-segment targets and predictions of the headline fit.
    pub targets: Vec<f64>,
    pub predictions: Vec<f64>,
    pub capacity: f64,
    pub nmse: f64,
    /// `C_tau` for `tau = 0..=max_tau` (memory task only).
    pub capacities: Vec<f64>,
}

impl TaskRun {
    /// Mean of `C_tau` over `1 <= tau <= 12`, or over the available delays.
    pub fn mean_capacity(&self) -> Option<f64> {
        let hi = (*MEAN_TAU_RANGE.end()).min(self.capacities.len().checked_sub(1)?);
        if hi < *MEAN_TAU_RANGE.start() {
            return None;
        }
        let window = &self.capacities[*MEAN_TAU_RANGE.start()..=hi];
        Some(window.iter().sum::<f64>() / window.len() as f64)
    }
}

/// Uniform `[0, 1]` draws scaled by `cfg.input_scale`.
pub fn memory_inputs<R: Rng + ?Sized>(cfg: &ReservoirConfig, rng: &mut R) -> Vec<f64> {
    (0..cfg.steps).map(|_| cfg.input_scale * rng.random::<f64>()).collect()
}

/// Delay-memory benchmark: one trajectory, one readout per delay with
/// targets `y_n = theta_{n - tau}`. The headline fields hold `tau = 1`.
pub fn memory_task<R: Rng + ?Sized>(
    cfg: &ReservoirConfig,
    template: &CircuitTemplate,
    max_tau: usize,
    rng: &mut R,
) -> Result<TaskRun> {
    if max_tau >= cfg.washout {
        return Err(Error::InvalidParameter(format!("max delay {max_tau} must be below washout {}", cfg.washout)));
    }
    let inputs = memory_inputs(cfg, rng);
    let features = run_sequence(cfg, template, &inputs)?;
    let mut fits = (0..=max_tau)
        .map(|tau| {
            let y: Vec<f64> = features.steps.iter().map(|&n| inputs[n - tau]).collect();
            fit_readout(&features, &y, cfg.ridge_lambda, cfg.train_fraction)
        })
        .collect::<Result<Vec<_>>>()?;
    let capacities = fits.iter().map(|f| f.capacity).collect();
    let head = fits.swap_remove(1.min(max_tau));
    Ok(TaskRun {
        inputs,
        targets: head.test_targets,
        predictions: head.predictions,
        capacity: head.capacity,
        nmse: head.nmse,
        capacities,
    })
}

/// `theta_n = 0.1 (1 + sin(w a n) sin(w b n) sin(w c n))` with
/// `(a, b, c) = (2.11, 3.73, 4.11)` and `w = 2 pi / 100`.
pub fn narma_inputs(steps: usize) -> Vec<f64> {
    let w = 2.0 * std::f64::consts::PI / 100.0;
    (0..steps)
        .map(|n| {
            let n = n as f64;
            0.1 * (1.0 + [2.11, 3.73, 4.11].iter().map(|x| (w * x * n).sin()).product::<f64>())
        })
        .collect()
}

/// NARMA recursion
/// `y(n+1) = 0.3 y_n + 0.05 y_n sum_{j<order} y_{n-j} + 1.5 theta_{n-order+1} theta_n + 0.1`
/// from zero history. Entry `n` of the result is `y(n+1)`, the target paired
/// with the feature row of step `n`.
pub fn narma_targets(inputs: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::InvalidParameter("NARMA order must be positive".into()));
    }
    // y[k] holds y_k; y_0 = 0.
    let mut y = vec![0.0; inputs.len() + 1];
    for n in 0..inputs.len() {
        let window: f64 = (0..order).filter(|&j| j <= n).map(|j| y[n - j]).sum();
        let delayed = if n + 1 >= order { inputs[n + 1 - order] } else { 0.0 };
        y[n + 1] = 0.3 * y[n] + 0.05 * y[n] * window + 1.5 * delayed * inputs[n] + 0.1;
        if !y[n + 1].is_finite() || y[n + 1].abs() > 1e6 {
            return Err(Error::Numerical(format!("NARMA target diverged at step {n}")));
        }
    }
    Ok(y[1..].to_vec())
}

/// NARMA benchmark on the deterministic input series.
pub fn narma_task(cfg: &ReservoirConfig, template: &CircuitTemplate, order: usize) -> Result<TaskRun> {
    let inputs = narma_inputs(cfg.steps);
    let targets = narma_targets(&inputs, order)?;
    let features = run_sequence(cfg, template, &inputs)?;
    let y: Vec<f64> = features.steps.iter().map(|&n| targets[n]).collect();
    let fit = fit_readout(&features, &y, cfg.ridge_lambda, cfg.train_fraction)?;
    Ok(TaskRun {
        inputs,
        targets: fit.test_targets,
        predictions: fit.predictions,
        capacity: fit.capacity,
        nmse: fit.nmse,
        capacities: Vec::new(),
    })
}

/// Forgetting of initial conditions under a shared input sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Convergence {
    /// Trace distance of the two starting states.
    pub initial: f64,
    /// Trace distance after each step.
    pub distances: Vec<f64>,
    /// Exponential fit `D = D0 2^{-eta n}` over distances above the floor.
    pub fit: Option<ExpFit>,
}

impl Convergence {
    pub fn eta(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| f.eta)
    }

    /// Distinct starting states merged below the floor before three
    /// resolvable points were collected; the rate is too fast to fit.
    pub fn collapsed(&self) -> bool {
        self.fit.is_none()
            && self.initial > DISTANCE_FLOOR
            && self.distances.last().is_some_and(|&d| d <= DISTANCE_FLOOR)
    }

    /// `eta > 0`, or an immediate collapse: the channel contracts distinct
    /// initial states.
    pub fn is_contractive(&self) -> bool {
        self.eta().is_some_and(|e| e > 0.0) || self.collapsed()
    }
}

/// Iterates two memory states with identical inputs and fits the decay of
/// their trace distance.
pub fn convergence_rate(
    cfg: &ReservoirConfig,
    template: &CircuitTemplate,
    inputs: &[f64],
    sigma_a: &DensityMatrix,
    sigma_b: &DensityMatrix,
) -> Result<Convergence> {
    let mut chan = ReservoirChannel::new(cfg, template)?;
    let (mut a, mut b) = (sigma_a.clone(), sigma_b.clone());
    let mut distances = Vec::with_capacity(inputs.len());
    for (n, &theta) in inputs.iter().enumerate() {
        chan.step(&mut a, theta, n)?;
        chan.step(&mut b, theta, n)?;
        distances.push(trace_distance(&a, &b)?);
    }
    let (ns, ds): (Vec<f64>, Vec<f64>) = distances
        .iter()
        .enumerate()
        .take_while(|(_, &d)| d > DISTANCE_FLOOR)
        .map(|(n, &d)| ((n + 1) as f64, d))
        .unzip();
    let fit = if ns.len() >= 3 { fit_exp_decay(&ns, &ds).ok() } else { None };
    let conv = Convergence { initial: trace_distance(sigma_a, sigma_b)?, distances, fit };
    match &conv.fit {
        None if conv.collapsed() => {
            debug!("states merged within {} steps; decay too fast to fit", ns.len() + 1)
        }
        None => warn!("trace distance not resolvable above {DISTANCE_FLOOR:e}; decay rate undefined"),
        Some(f) if f.eta <= 0.0 => warn!("trace distance does not decay (eta = {}): echo-state violation", f.eta),
        _ => {}
    }
    Ok(conv)
}
