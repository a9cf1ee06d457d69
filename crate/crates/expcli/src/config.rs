//! Sweep specification loaded from TOML, with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn unit_grid(step: f64) -> Vec<f64> {
    let k = (1.0 / step).round() as usize;
    (0..=k).map(|i| (i as f64 * step * 1e6).round() / 1e6).collect()
}

/// Starting state of pure-state diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `|0...0>`
    Zero,
    /// Independent Haar-random single-qubit states.
    RandomProduct,
}

impl InitialState {
    pub fn label(self) -> &'static str {
        match self {
            InitialState::Zero => "zero",
            InitialState::RandomProduct => "random-product",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub seed: u64,
    pub realizations: usize,
    /// Worker threads; 0 uses one per core.
    pub jobs: usize,
    pub out: PathBuf,
    pub diagnose: DiagnoseSpec,
    pub task: TaskSpec,
    pub scaling: ScalingSpec,
    pub haar: HaarSpec,
    pub crossovers: CrossoverSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnoseSpec {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub d_over_n: Vec<f64>,
    pub input: InitialState,
    /// Compute SRE-2 terms (skipped above the Pauli-transform cap).
    pub magic: bool,
    pub haar_samples: usize,
    pub bins: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskSpec {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub d_over_n: Vec<f64>,
    pub max_tau: usize,
    pub memory: bool,
    pub narma: bool,
    pub narma_order: usize,
    pub convergence: bool,
    pub convergence_steps: usize,
    pub steps: usize,
    pub washout: usize,
    pub input_scale: f64,
    pub ridge_lambda: f64,
    pub train_fraction: f64,
    pub all_qubit_observables: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSpec {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub d_over_n: Vec<f64>,
    pub input: InitialState,
    pub haar: bool,
    pub haar_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HaarSpec {
    pub n: Vec<usize>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossoverSpec {
    /// Diagnose summary to analyse; defaults to `<out>/diagnose/summary.csv`.
    pub input: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            seed: 2024,
            realizations: 50,
            jobs: 0,
            out: PathBuf::from("results"),
            diagnose: DiagnoseSpec::default(),
            task: TaskSpec::default(),
            scaling: ScalingSpec::default(),
            haar: HaarSpec::default(),
            crossovers: CrossoverSpec::default(),
        }
    }
}

impl Default for DiagnoseSpec {
    fn default() -> Self {
        Self {
            n: vec![8, 10, 12, 14],
            p: unit_grid(0.1),
            d_over_n: vec![2.0],
            input: InitialState::Zero,
            magic: true,
            haar_samples: 200,
            bins: pqrc_core::spectra::DEFAULT_BINS,
        }
    }
}

impl Default for TaskSpec {
    fn default() -> Self {
        Self {
            n: vec![6, 8, 10],
            p: vec![0.0, 0.02, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0],
            d_over_n: vec![2.0],
            max_tau: 20,
            memory: true,
            narma: true,
            narma_order: pqrc_core::reservoir::NARMA_ORDER,
            convergence: true,
            convergence_steps: 200,
            steps: 2000,
            washout: 500,
            input_scale: 1e-3,
            ridge_lambda: 1e-8,
            train_fraction: 0.7,
            all_qubit_observables: false,
        }
    }
}

impl Default for ScalingSpec {
    fn default() -> Self {
        Self {
            n: vec![6, 8, 10, 12],
            p: vec![0.0, 0.1, 0.3, 0.5, 0.7, 0.9],
            d_over_n: vec![2.0],
            input: InitialState::Zero,
            haar: true,
            haar_samples: 200,
        }
    }
}

impl Default for HaarSpec {
    fn default() -> Self {
        Self { n: vec![6, 8, 10, 12], samples: 200 }
    }
}

impl Default for CrossoverSpec {
    fn default() -> Self {
        Self { input: None }
    }
}

fn check_grid(name: &str, ps: &[f64], ns: &[usize], ratios: &[f64]) -> Result<()> {
    if ps.is_empty() || ns.is_empty() || ratios.is_empty() {
        return Err(CliError::Config(format!("{name}: grids over p, n and d_over_n must be nonempty")));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CliError::Config(format!("{name}: p = {p} outside [0, 1]")));
    }
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Config(format!("{name}: N = {n} below 2")));
    }
    if let Some(r) = ratios.iter().find(|&&r| !(r > 0.0)) {
        return Err(CliError::Config(format!("{name}: d_over_n = {r} must be positive")));
    }
    Ok(())
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(CliError::Config("realizations must be at least 1".into()));
        }
        check_grid("diagnose", &self.diagnose.p, &self.diagnose.n, &self.diagnose.d_over_n)?;
        check_grid("task", &self.task.p, &self.task.n, &self.task.d_over_n)?;
        check_grid("scaling", &self.scaling.p, &self.scaling.n, &self.scaling.d_over_n)?;
        let min = pqrc_core::magic::MIN_HAAR_SAMPLES;
        for (name, s) in [
            ("diagnose.haar_samples", self.diagnose.haar_samples),
            ("scaling.haar_samples", self.scaling.haar_samples),
            ("haar.samples", self.haar.samples),
        ] {
            if s < min {
                return Err(CliError::Config(format!("{name} = {s} below {min}")));
            }
        }
        if self.diagnose.bins == 0 {
            return Err(CliError::Config("diagnose.bins must be positive".into()));
        }
        let t = &self.task;
        if t.washout >= t.steps {
            return Err(CliError::Config(format!("task.washout {} >= task.steps {}", t.washout, t.steps)));
        }
        if t.max_tau >= t.washout {
            return Err(CliError::Config(format!("task.max_tau {} >= task.washout {}", t.max_tau, t.washout)));
        }
        if !(t.train_fraction > 0.0 && t.train_fraction < 1.0) {
            return Err(CliError::Config(format!("task.train_fraction {} outside (0, 1)", t.train_fraction)));
        }
        if self.scaling.n.len() < 3 {
            return Err(CliError::Config("scaling needs at least three system sizes".into()));
        }
        Ok(())
    }

    /// Shrinks every grid to a quick end-to-end check.
    pub fn smoke(mut self) -> Self {
        self.realizations = 10;
        self.diagnose.n = vec![6, 8];
        self.diagnose.p = vec![0.0, 0.2, 0.5, 0.8, 1.0];
        self.diagnose.haar_samples = 50;
        self.task.n = vec![6];
        self.task.p = vec![0.0, 0.1, 0.5, 0.9];
        self.task.steps = 1000;
        self.task.washout = 300;
        self.scaling.n = vec![6, 8, 10];
        self.scaling.p = vec![0.0, 0.3, 0.7];
        self.scaling.haar_samples = 50;
        self.haar.n = vec![4, 6];
        self.haar.samples = 50;
        self
    }

    pub fn crossover_input(&self) -> PathBuf {
        self.crossovers.input.clone().unwrap_or_else(|| self.out.join("diagnose").join("summary.csv"))
    }
}

/// Brick layers for a given size and depth ratio.
pub fn depth_for(n: usize, d_over_n: f64) -> usize {
    ((d_over_n * n as f64).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let spec = SweepSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.diagnose.p.len(), 11);
        assert_eq!(spec.diagnose.p[3], 0.3);
        let back = SweepSpec::from_toml_str(&spec.to_toml_string()).unwrap();
        assert_eq!(back, spec);
        spec.smoke().validate().unwrap();
    }

    #[test]
    fn partial_files_fill_defaults() {
        let spec = SweepSpec::from_toml_str("seed = 7\n[task]\nn = [4]\n").unwrap();
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.task.n, vec![4]);
        assert_eq!(spec.task.steps, 2000);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SweepSpec::from_toml_str("realizations = 0").is_err());
        assert!(SweepSpec::from_toml_str("[diagnose]\np = [1.5]").is_err());
        assert!(SweepSpec::from_toml_str("unknown_knob = 1").is_err());
        assert!(SweepSpec::from_toml_str("[task]\nwashout = 3000").is_err());
        assert!(SweepSpec::from_toml_str("[scaling]\nn = [6, 8]").is_err());
    }

    #[test]
    fn depth_rounding() {
        assert_eq!(depth_for(10, 2.0), 20);
        assert_eq!(depth_for(6, 0.5), 3);
        assert_eq!(depth_for(3, 0.1), 1);
    }
}
