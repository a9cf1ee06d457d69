use serde::{Deserialize, Serialize};

use crate::circuit::CircuitTemplate;
use crate::error::{Error, Result};
use crate::qcore::{Subsystem, DENSITY_CAP};

/// Parameters of one reservoir: register split, circuit draw and readout
/// training knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReservoirConfig {
    pub n_qubits: usize,
    /// Brick layers of the fixed reservoir unitary.
    pub depth: usize,
    pub p: f64,
    pub memory: Vec<usize>,
    pub readout: Vec<usize>,
    pub template_seed: u64,
    /// Multiplies uniform `[0, 1]` draws in the delay-memory task.
    pub input_scale: f64,
    pub washout: usize,
    pub steps: usize,
    pub ridge_lambda: f64,
    pub train_fraction: f64,
    /// Measure `Z` and `ZZ` on every qubit instead of the readout half only.
    pub all_qubit_observables: bool,
}

impl ReservoirConfig {
    /// Defaults: memory is the left half, readout the right half, 2000 steps
    /// with a washout of 500, inputs scaled by `1e-3`, ridge `1e-8`, 70/30
    /// contiguous split.
    pub fn new(n_qubits: usize, depth: usize, p: f64, template_seed: u64) -> Self {
        let half = n_qubits / 2;
        Self {
            n_qubits,
            depth,
            p,
            memory: (0..half).collect(),
            readout: (half..n_qubits).collect(),
            template_seed,
            input_scale: 1e-3,
            washout: 500,
            steps: 2000,
            ridge_lambda: 1e-8,
            train_fraction: 0.7,
            all_qubit_observables: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits > DENSITY_CAP {
            return Err(Error::CapExceeded { kind: "density matrix", cap: DENSITY_CAP, requested: self.n_qubits });
        }
        self.split()?;
        let mut all: Vec<usize> = self.memory.iter().chain(&self.readout).copied().collect();
        all.sort_unstable();
        if all != (0..self.n_qubits).collect::<Vec<_>>() {
            return Err(Error::InvalidSubsystem(format!(
                "memory {:?} and readout {:?} must partition 0..{}",
                self.memory, self.readout, self.n_qubits
            )));
        }
        if self.washout >= self.steps {
            return Err(Error::InvalidParameter(format!("washout {} >= steps {}", self.washout, self.steps)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!("train fraction {} outside (0, 1)", self.train_fraction)));
        }
        if !(self.ridge_lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("ridge lambda {} is negative", self.ridge_lambda)));
        }
        Ok(())
    }

    /// Memory qubits kept, readout qubits traced.
    pub fn split(&self) -> Result<Subsystem> {
        Subsystem::new(self.n_qubits, &self.memory)
    }

    pub fn template(&self) -> Result<CircuitTemplate> {
        CircuitTemplate::sample(self.n_qubits, self.depth, self.p, self.template_seed)
    }

    /// Qubit sets of the diagonal observables, in feature-column order:
    /// single `Z_i` first, then `Z_i Z_j` with `i < j`. The bias column is
    /// not listed.
    pub fn observables(&self) -> Vec<Vec<usize>> {
        let mut qubits: Vec<usize> =
            if self.all_qubit_observables { (0..self.n_qubits).collect() } else { self.readout.clone() };
        qubits.sort_unstable();
        let mut obs: Vec<Vec<usize>> = qubits.iter().map(|&q| vec![q]).collect();
        for (k, &i) in qubits.iter().enumerate() {
            for &j in &qubits[k + 1..] {
                obs.push(vec![i, j]);
            }
        }
        obs
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .observables()
            .iter()
            .map(|o| o.iter().map(|q| format!("Z{q}")).collect::<String>())
            .collect();
        names.push("bias".into());
        names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_halves() {
        let c = ReservoirConfig::new(6, 12, 0.3, 1);
        c.validate().unwrap();
        assert_eq!(c.memory, vec![0, 1, 2]);
        assert_eq!(c.readout, vec![3, 4, 5]);
        assert_eq!(c.feature_names(), vec!["Z3", "Z4", "Z5", "Z3Z4", "Z3Z5", "Z4Z5", "bias"]);
    }

    #[test]
    fn rejects_bad_splits() {
        let mut c = ReservoirConfig::new(4, 2, 0.3, 1);
        c.readout = vec![1, 2, 3];
        assert!(c.validate().is_err());
        let mut c = ReservoirConfig::new(4, 2, 0.3, 1);
        c.readout = vec![2];
        assert!(c.validate().is_err());
        let mut c = ReservoirConfig::new(4, 2, 0.3, 1);
        c.washout = c.steps;
        assert!(c.validate().is_err());
        assert!(ReservoirConfig::new(14, 2, 0.3, 1).validate().is_err());
    }

    #[test]
    fn all_qubit_switch() {
        let mut c = ReservoirConfig::new(4, 2, 0.3, 1);
        c.all_qubit_observables = true;
        assert_eq!(c.observables().len(), 4 + 6);
    }
}
