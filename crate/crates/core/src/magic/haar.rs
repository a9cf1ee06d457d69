//! Haar-random reference ensembles for magic and anti-flatness.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pauli::PAULI_CAP;
use super::sre::{anti_flatness_from_eigenvalues, mutual_magic};
use crate::error::{Error, Result};
use crate::qcore::{StateVector, Subsystem};
use crate::rng::{child_seed, rng_from_seed, stream};
use crate::stats::mean_and_se;

pub const MIN_HAAR_SAMPLES: usize = 50;

/// Ensemble means (with standard errors) over Haar-random pure states, cut
/// into equal halves. Magic fields are `None` above the Pauli-transform cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaarReference {
    pub n_qubits: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean_purity: f64,
    pub se_purity: f64,
    pub mean_anti_flatness: f64,
    pub se_anti_flatness: f64,
    pub mean_total_magic: Option<f64>,
    pub se_total_magic: Option<f64>,
    pub mean_mutual_magic: Option<f64>,
    pub se_mutual_magic: Option<f64>,
}

struct HaarSample {
    purity: f64,
    anti_flatness: f64,
    magic: Option<(f64, f64)>,
}

fn haar_sample(n_qubits: usize, seed: u64, with_magic: bool) -> Result<HaarSample> {
    let mut rng = rng_from_seed(seed);
    let psi = StateVector::haar_random(n_qubits, &mut rng)?;
    let sub = Subsystem::first_half(n_qubits)?;
    let side = if sub.kept().len() * 2 <= n_qubits { sub.clone() } else { sub.complement() };
    let eigs = psi.reduced(&side).eigenvalues()?;
    let purity = eigs.iter().map(|l| l * l).sum();
    let magic = if with_magic {
        let rep = mutual_magic(&psi, Some(&sub))?;
        Some((rep.total_magic, rep.mutual_magic))
    } else {
        None
    };
    Ok(HaarSample { purity, anti_flatness: anti_flatness_from_eigenvalues(&eigs), magic })
}

/// Samples `samples` Haar states; sample `k` uses the child stream
/// `(seed, HAAR, k)`, so results do not depend on the thread count.
pub fn haar_reference(n_qubits: usize, samples: usize, seed: u64) -> Result<HaarReference> {
    haar_reference_with(n_qubits, samples, seed, n_qubits <= PAULI_CAP)
}

/// Purity and anti-flatness only; skips the `4^N` Pauli transforms.
pub fn haar_flatness(n_qubits: usize, samples: usize, seed: u64) -> Result<HaarReference> {
    haar_reference_with(n_qubits, samples, seed, false)
}

fn haar_reference_with(n_qubits: usize, samples: usize, seed: u64, with_magic: bool) -> Result<HaarReference> {
    if samples < MIN_HAAR_SAMPLES {
        return Err(Error::InvalidParameter(format!("need >= {MIN_HAAR_SAMPLES} Haar samples, got {samples}")));
    }
    if n_qubits < 2 {
        return Err(Error::InvalidParameter("Haar reference needs N >= 2".into()));
    }
    let draws: Vec<HaarSample> = (0..samples)
        .into_par_iter()
        .map(|k| haar_sample(n_qubits, child_seed(seed, &[stream::HAAR, k as u64]), with_magic))
        .collect::<Result<_>>()?;
    let pick = |f: &dyn Fn(&HaarSample) -> f64| mean_and_se(&draws.iter().map(f).collect::<Vec<_>>());
    let (mean_purity, se_purity) = pick(&|s| s.purity);
    let (mean_anti_flatness, se_anti_flatness) = pick(&|s| s.anti_flatness);
    let (tm, im) = if with_magic {
        (Some(pick(&|s| s.magic.unwrap().0)), Some(pick(&|s| s.magic.unwrap().1)))
    } else {
        (None, None)
    };
    Ok(HaarReference {
        n_qubits,
        samples,
        seed,
        mean_purity,
        se_purity,
        mean_anti_flatness,
        se_anti_flatness,
        mean_total_magic: tm.map(|v| v.0),
        se_total_magic: tm.map(|v| v.1),
        mean_mutual_magic: im.map(|v| v.0),
        se_mutual_magic: im.map(|v| v.1),
    })
}

/// JSON cache of Haar references keyed by `(N, samples, seed)`.
#[derive(Clone, Debug)]
pub struct HaarCache {
    dir: PathBuf,
}

impl HaarCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, n_qubits: usize, samples: usize, seed: u64) -> PathBuf {
        self.dir.join(format!("haar_n{n_qubits}_s{samples}_seed{seed}.json"))
    }

    pub fn load(&self, n_qubits: usize, samples: usize, seed: u64) -> Option<HaarReference> {
        let text = fs::read_to_string(self.path_for(n_qubits, samples, seed)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn load_or_compute(&self, n_qubits: usize, samples: usize, seed: u64) -> Result<HaarReference> {
        if let Some(r) = self.load(n_qubits, samples, seed) {
            return Ok(r);
        }
        let r = haar_reference(n_qubits, samples, seed)?;
        store(&self.path_for(n_qubits, samples, seed), &r)?;
        Ok(r)
    }
}

fn store(path: &Path, r: &HaarReference) -> Result<()> {
    let io = |e: std::io::Error| Error::Numerical(format!("cache write {}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let text = serde_json::to_string_pretty(r).expect("plain struct serializes");
    fs::write(path, text).map_err(io)
}
