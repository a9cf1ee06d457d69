use crate::error::{Error, Result};

/// Bipartition of an `n`-qubit register into kept and traced qubits.
///
/// Kept qubits are sorted ascending; local bit `j` of a reduced index maps to
/// `kept[j]`. The offset tables scatter reduced indices back into full
/// register indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    n_qubits: usize,
    kept: Vec<usize>,
    traced: Vec<usize>,
    kept_offsets: Vec<usize>,
    traced_offsets: Vec<usize>,
}

fn scatter_table(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> j & 1 == 1)
                .fold(0usize, |acc, (_, &q)| acc | 1 << q)
        })
        .collect()
}

impl Subsystem {
    /// `keep` must be a nonempty proper subset of `0..n_qubits`.
    pub fn new(n_qubits: usize, keep: &[usize]) -> Result<Self> {
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() != keep.len() {
            return Err(Error::InvalidSubsystem(format!("duplicate qubits in {keep:?}")));
        }
        if kept.is_empty() {
            return Err(Error::InvalidSubsystem("empty keep set".into()));
        }
        if kept.iter().any(|&q| q >= n_qubits) {
            return Err(Error::InvalidTargets { targets: keep.to_vec(), n_qubits });
        }
        if kept.len() == n_qubits {
            return Err(Error::InvalidSubsystem("keep set covers the whole register".into()));
        }
        let traced: Vec<usize> = (0..n_qubits).filter(|q| !kept.contains(q)).collect();
        Ok(Self {
            n_qubits,
            kept_offsets: scatter_table(&kept),
            traced_offsets: scatter_table(&traced),
            kept,
            traced,
        })
    }

    /// The left half `0..n/2` of the register.
    pub fn first_half(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, &(0..n_qubits / 2).collect::<Vec<_>>())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn traced(&self) -> &[usize] {
        &self.traced
    }

    pub fn complement(&self) -> Self {
        Self::new(self.n_qubits, &self.traced).expect("complement of a proper subset is proper")
    }

    pub fn kept_dim(&self) -> usize {
        self.kept_offsets.len()
    }

    pub fn traced_dim(&self) -> usize {
        self.traced_offsets.len()
    }

    #[inline]
    pub fn full_index(&self, kept_local: usize, traced_local: usize) -> usize {
        self.kept_offsets[kept_local] | self.traced_offsets[traced_local]
    }

    pub fn kept_offsets(&self) -> &[usize] {
        &self.kept_offsets
    }

    pub fn traced_offsets(&self) -> &[usize] {
        &self.traced_offsets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sets() {
        assert!(Subsystem::new(3, &[]).is_err());
        assert!(Subsystem::new(3, &[0, 1, 2]).is_err());
        assert!(Subsystem::new(3, &[0, 0]).is_err());
        assert!(Subsystem::new(3, &[3]).is_err());
    }

    #[test]
    fn offsets_partition_the_register() {
        let s = Subsystem::new(4, &[3, 1]).unwrap();
        assert_eq!(s.kept(), &[1, 3]);
        assert_eq!(s.traced(), &[0, 2]);
        let mut seen = vec![false; 16];
        for a in 0..s.kept_dim() {
            for t in 0..s.traced_dim() {
                seen[s.full_index(a, t)] = true;
            }
        }
        assert!(seen.into_iter().all(|b| b));
        assert_eq!(s.full_index(0b10, 0), 0b1000);
    }
}
