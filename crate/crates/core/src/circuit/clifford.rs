//! Exhaustive table of the two-qubit Clifford group modulo global phase.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qcore::GateMatrix;

/// Order of the two-qubit Clifford group modulo phase.
pub const CLIFFORD2_ORDER: usize = 11520;

type Key = [i64; 32];

const KEY_SCALE: f64 = 1e6;

/// Rotates the global phase so the first nonzero entry (row-major) is
/// positive real.
fn canonicalize(g: &GateMatrix) -> [C64; 16] {
    let mut m = [C64::new(0.0, 0.0); 16];
    m.copy_from_slice(g.entries());
    let pivot = m.iter().copied().find(|z| z.norm() > 1e-9).expect("unitary has a nonzero entry");
    let phase = pivot.conj() / pivot.norm();
    m.iter_mut().for_each(|z| *z *= phase);
    m
}

fn key_of(m: &[C64; 16]) -> Key {
    let mut key = [0i64; 32];
    for (i, z) in m.iter().enumerate() {
        key[2 * i] = (z.re * KEY_SCALE).round() as i64;
        key[2 * i + 1] = (z.im * KEY_SCALE).round() as i64;
    }
    key
}

#[derive(Debug)]
pub struct CliffordTable {
    gates: Vec<GateMatrix>,
    index: HashMap<Key, usize>,
}

impl CliffordTable {
    /// Closure of `{H(x)I, I(x)H, S(x)I, I(x)S, CX(0->1), CX(1->0)}` under
    /// left multiplication, breadth first from the identity.
    pub fn build() -> Result<Self> {
        let id1 = GateMatrix::identity(1);
        let generators = [
            GateMatrix::kron(&GateMatrix::h(), &id1)?,
            GateMatrix::kron(&id1, &GateMatrix::h())?,
            GateMatrix::kron(&GateMatrix::s(), &id1)?,
            GateMatrix::kron(&id1, &GateMatrix::s())?,
            GateMatrix::cx(),
            GateMatrix::swap().matmul(&GateMatrix::cx())?.matmul(&GateMatrix::swap())?,
        ];
        let mut gates = Vec::with_capacity(CLIFFORD2_ORDER);
        let mut index = HashMap::with_capacity(CLIFFORD2_ORDER);
        let mut queue = VecDeque::new();

        let start = canonicalize(&GateMatrix::identity(2));
        index.insert(key_of(&start), 0);
        gates.push(GateMatrix::from_entries(2, &start, true)?);
        queue.push_back(0usize);

        while let Some(i) = queue.pop_front() {
            for g in &generators {
                let prod = g.matmul(&gates[i])?;
                let canon = canonicalize(&prod);
                let key = key_of(&canon);
                if index.contains_key(&key) {
                    continue;
                }
                if gates.len() == CLIFFORD2_ORDER {
                    return Err(Error::Numerical(format!(
                        "Clifford closure exceeded {CLIFFORD2_ORDER} elements; canonicalization is broken"
                    )));
                }
                index.insert(key, gates.len());
                gates.push(GateMatrix::from_entries(2, &canon, true)?);
                queue.push_back(gates.len() - 1);
            }
        }
        if gates.len() != CLIFFORD2_ORDER {
            return Err(Error::Numerical(format!("Clifford closure has {} elements", gates.len())));
        }
        Ok(Self { gates, index })
    }

    /// Process-wide table, built on first use.
    pub fn shared() -> &'static CliffordTable {
        static TABLE: OnceLock<CliffordTable> = OnceLock::new();
        TABLE.get_or_init(|| CliffordTable::build().expect("two-qubit Clifford closure"))
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&GateMatrix> {
        self.gates.get(i)
    }

    pub fn gates(&self) -> &[GateMatrix] {
        &self.gates
    }

    /// Table index of `g` modulo global phase, if it is a two-qubit Clifford.
    pub fn index_of(&self, g: &GateMatrix) -> Option<usize> {
        if g.arity() != 2 {
            return None;
        }
        self.index.get(&key_of(&canonicalize(g))).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn paulis() -> Vec<GateMatrix> {
        let one = [GateMatrix::identity(1), GateMatrix::x(), GateMatrix::y(), GateMatrix::z()];
        let mut out = Vec::new();
        for b in &one {
            for a in &one {
                out.push(GateMatrix::kron(a, b).unwrap());
            }
        }
        out
    }

    /// Returns true when `m = phase * P` for some two-qubit Pauli `P` and phase in {+-1, +-i}.
    fn is_pauli_up_to_phase(m: &GateMatrix, paulis: &[GateMatrix]) -> bool {
        let phases = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
        paulis.iter().any(|p| {
            phases
                .iter()
                .any(|ph| m.entries().iter().zip(p.entries()).all(|(a, b)| (a - ph * b).norm() < 1e-9))
        })
    }

    #[test]
    fn order_and_identity() {
        let t = CliffordTable::shared();
        assert_eq!(t.len(), CLIFFORD2_ORDER);
        assert_eq!(t.index_of(&GateMatrix::identity(2)), Some(0));
        assert!(t.index_of(&GateMatrix::ct()).is_none());
        assert!(t.index_of(&GateMatrix::swap()).is_some());
    }

    #[test]
    fn closed_under_composition() {
        let t = CliffordTable::shared();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a = t.get(rng.random_range(0..t.len())).unwrap();
            let b = t.get(rng.random_range(0..t.len())).unwrap();
            assert!(t.index_of(&a.matmul(b).unwrap()).is_some());
        }
    }

    #[test]
    fn conjugates_paulis_to_paulis() {
        let t = CliffordTable::shared();
        let ps = paulis();
        let id1 = GateMatrix::identity(1);
        let probes = [
            GateMatrix::kron(&GateMatrix::x(), &id1).unwrap(),
            GateMatrix::kron(&GateMatrix::z(), &id1).unwrap(),
            GateMatrix::kron(&id1, &GateMatrix::x()).unwrap(),
            GateMatrix::kron(&id1, &GateMatrix::z()).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u = t.get(rng.random_range(0..t.len())).unwrap();
            for p in &probes {
                let conj = u.matmul(p).unwrap().matmul(&u.adjoint()).unwrap();
                assert!(is_pauli_up_to_phase(&conj, &ps));
            }
        }
        // and a non-Clifford does not
        let ct = GateMatrix::ct();
        let conj = ct.matmul(&probes[0]).unwrap().matmul(&ct.adjoint()).unwrap();
        assert!(!is_pauli_up_to_phase(&conj, &ps));
    }
}
