//! Brickwork circuit realizations.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clifford::{CliffordTable, CLIFFORD2_ORDER};
use crate::error::{Error, Result};
use crate::qcore::{GateMatrix, QuantumState};
use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateChoice {
    Ct,
    Clifford(u16),
}

impl GateChoice {
    pub fn matrix(&self, table: &CliffordTable) -> GateMatrix {
        match *self {
            GateChoice::Ct => GateMatrix::ct(),
            GateChoice::Clifford(i) => *table.get(i as usize).expect("index below table order"),
        }
    }
}

impl fmt::Display for GateChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateChoice::Ct => write!(f, "T"),
            GateChoice::Clifford(i) => write!(f, "C{i}"),
        }
    }
}

impl FromStr for GateChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad gate token {s:?}"));
        match s {
            "T" => Ok(GateChoice::Ct),
            _ => {
                let idx: u16 = s.strip_prefix('C').ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if idx as usize >= CLIFFORD2_ORDER {
                    return Err(bad());
                }
                Ok(GateChoice::Clifford(idx))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub layer: usize,
    /// Lower qubit first; it is `targets[0]` for the gate matrix.
    pub qubits: (usize, usize),
    pub gate: GateChoice,
}

/// Qubit pairs of brickwork sublayer `layer`: even layers couple
/// `(2i, 2i+1)`, odd layers `(2i+1, 2i+2)`, open boundaries.
pub fn brickwork_pairs(n_qubits: usize, layer: usize) -> Vec<(usize, usize)> {
    let start = layer % 2;
    (start..n_qubits.saturating_sub(1)).step_by(2).map(|a| (a, a + 1)).collect()
}

/// One realization of the probabilistic brickwork. `depth` counts brick
/// layers; each brick layer is an even sublayer followed by an odd one, so a
/// template holds `(N - 1) * depth` gates.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitTemplate {
    n_qubits: usize,
    depth: usize,
    p: f64,
    seed: u64,
    slots: Vec<Slot>,
    layer_starts: Vec<usize>,
}

fn validate_params(n_qubits: usize, p: f64) -> Result<()> {
    if n_qubits < 2 {
        return Err(Error::InvalidParameter(format!("brickwork needs N >= 2, got {n_qubits}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("CT probability {p} outside [0, 1]")));
    }
    Ok(())
}

impl CircuitTemplate {
    /// Draws each slot independently: CT with probability `p`, otherwise a
    /// uniform index into the two-qubit Clifford table. `depth = 0` gives the
    /// empty circuit.
    pub fn sample(n_qubits: usize, depth: usize, p: f64, seed: u64) -> Result<Self> {
        validate_params(n_qubits, p)?;
        let mut rng = rng_from_seed(seed);
        let mut slots = Vec::new();
        let mut layer_starts = Vec::with_capacity(2 * depth + 1);
        for layer in 0..2 * depth {
            layer_starts.push(slots.len());
            for qubits in brickwork_pairs(n_qubits, layer) {
                let gate = if rng.random::<f64>() < p {
                    GateChoice::Ct
                } else {
                    GateChoice::Clifford(rng.random_range(0..CLIFFORD2_ORDER) as u16)
                };
                slots.push(Slot { layer, qubits, gate });
            }
        }
        layer_starts.push(slots.len());
        Ok(Self { n_qubits, depth, p, seed, slots, layer_starts })
    }

    /// Template with an explicit gate per slot, in brickwork order.
    pub fn from_choices(n_qubits: usize, depth: usize, gates: &[GateChoice]) -> Result<Self> {
        validate_params(n_qubits, 0.0)?;
        let mut slots = Vec::new();
        let mut layer_starts = Vec::with_capacity(2 * depth + 1);
        let mut it = gates.iter();
        for layer in 0..2 * depth {
            layer_starts.push(slots.len());
            for qubits in brickwork_pairs(n_qubits, layer) {
                let gate = *it
                    .next()
                    .ok_or_else(|| Error::DimensionMismatch { expected: slots.len() + 1, found: gates.len() })?;
                slots.push(Slot { layer, qubits, gate });
            }
        }
        if it.next().is_some() {
            return Err(Error::DimensionMismatch { expected: slots.len(), found: gates.len() });
        }
        layer_starts.push(slots.len());
        Ok(Self { n_qubits, depth, p: f64::NAN, seed: 0, slots, layer_starts })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn sublayers(&self) -> usize {
        2 * self.depth
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn sublayer(&self, sublayer: usize) -> &[Slot] {
        &self.slots[self.layer_starts[sublayer]..self.layer_starts[sublayer + 1]]
    }

    pub fn ct_count(&self) -> usize {
        self.slots.iter().filter(|s| s.gate == GateChoice::Ct).count()
    }

    pub fn ct_fraction(&self) -> f64 {
        if self.slots.is_empty() {
            0.0
        } else {
            self.ct_count() as f64 / self.slots.len() as f64
        }
    }

    /// Gate sequence in application order.
    pub fn gates(&self) -> impl Iterator<Item = (GateMatrix, [usize; 2])> + '_ {
        let table = CliffordTable::shared();
        self.slots.iter().map(move |s| (s.gate.matrix(table), [s.qubits.0, s.qubits.1]))
    }

    fn check_state<S: QuantumState>(&self, state: &S) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: state.n_qubits() });
        }
        Ok(())
    }

    /// Applies every sublayer in order.
    pub fn apply<S: QuantumState>(&self, state: &mut S) -> Result<()> {
        self.check_state(state)?;
        for (g, t) in self.gates() {
            state.apply_gate(&g, &t)?;
        }
        Ok(())
    }

    /// Applies brick layer `layer` only (its even and odd sublayers).
    pub fn apply_layer<S: QuantumState>(&self, state: &mut S, layer: usize) -> Result<()> {
        self.check_state(state)?;
        if layer >= self.depth {
            return Err(Error::InvalidParameter(format!("layer {layer} beyond depth {}", self.depth)));
        }
        let table = CliffordTable::shared();
        for s in self.sublayer(2 * layer).iter().chain(self.sublayer(2 * layer + 1)) {
            state.apply_gate(&s.gate.matrix(table), &[s.qubits.0, s.qubits.1])?;
        }
        Ok(())
    }

    pub fn to_record(&self, include_slots: bool) -> TemplateRecord {
        TemplateRecord {
            n_qubits: self.n_qubits,
            depth: self.depth,
            p: self.p,
            seed: self.seed,
            slots: include_slots
                .then(|| self.slots.iter().map(|s| s.gate.to_string()).collect::<Vec<_>>().join(" ")),
        }
    }
}

/// Applies every sublayer of `template` to `state`.
pub fn apply_template<S: QuantumState>(state: &mut S, template: &CircuitTemplate) -> Result<()> {
    template.apply(state)
}

/// Compact text record: the seed and parameters regenerate the template; the
/// optional slot list (`T` or `C<index>` tokens) is kept for audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateRecord {
    pub n_qubits: usize,
    pub depth: usize,
    pub p: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<String>,
}

impl TemplateRecord {
    /// Regenerates the template; fails if an audited slot list disagrees.
    pub fn regenerate(&self) -> Result<CircuitTemplate> {
        let t = CircuitTemplate::sample(self.n_qubits, self.depth, self.p, self.seed)?;
        if let Some(list) = &self.slots {
            let parsed: Vec<GateChoice> = list.split_whitespace().map(str::parse).collect::<Result<_>>()?;
            let realized: Vec<GateChoice> = t.slots.iter().map(|s| s.gate).collect();
            if parsed != realized {
                return Err(Error::InvalidParameter("slot list does not match seed".into()));
            }
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

/// `R_Y(theta)` on each memory qubit.
pub fn encoding_layer(theta: f64, memory_qubits: &[usize]) -> Vec<(GateMatrix, usize)> {
    let g = GateMatrix::ry(theta);
    memory_qubits.iter().map(|&q| (g, q)).collect()
}
