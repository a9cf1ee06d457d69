//! Pure-state diagnostic sweep: entanglement growth, spacing ratios, magic
//! and anti-flatness per realization, averaged per grid point.

use std::collections::BTreeMap;
use std::path::Path;

use log::{info, warn};

use pqrc_core::circuit::CircuitTemplate;
use pqrc_core::magic::{anti_flatness_from_eigenvalues, mutual_magic, relative_gap, HaarCache, MagicReport, RelativeGap, PAULI_CAP};
use pqrc_core::qcore::{StateVector, Subsystem};
use pqrc_core::rng::{child_seed, rng_from_seed, stream};
use pqrc_core::spectra::{
    entropy_from_eigenvalues, ratio_histogram, spacing_ratios, EntanglementSpectrum, EntropyOrder, SpectrumStats,
    DEFAULT_CUTOFF,
};

use crate::agg::{estimate_of, mean, se, Estimate};
use crate::config::{InitialState, SweepSpec};
use crate::error::Result;
use crate::meta::{write_tables, OutputFile};
use crate::runner::{build_pool, expand_grid, run_realizations, Point};
use crate::table::{f, opt, Table, DIAGNOSE_RESULTS, DIAGNOSE_SUMMARY, ENTROPY_CURVES, R_HISTOGRAM};

/// Template and starting state of one realization.
pub fn prepare(pt: &Point, input: InitialState, seed: u64) -> Result<(CircuitTemplate, StateVector)> {
    let template = CircuitTemplate::sample(pt.n, pt.depth, pt.p, child_seed(seed, &[stream::TEMPLATE]))?;
    let psi = match input {
        InitialState::Zero => StateVector::zero(pt.n)?,
        InitialState::RandomProduct => {
            StateVector::random_product(pt.n, &mut rng_from_seed(child_seed(seed, &[stream::INITIAL_STATE])))?
        }
    };
    Ok((template, psi))
}

#[derive(Clone, Debug)]
pub struct DiagnoseRealization {
    pub point: usize,
    pub realization: usize,
    pub seed: u64,
    pub ct_fraction: f64,
    /// Half-cut entropy before the first layer and after each layer.
    pub entropy_curve: Vec<f64>,
    pub stats: Option<SpectrumStats>,
    pub magic: Option<MagicReport>,
    pub anti_flatness: Option<f64>,
    /// Failure or skipped diagnostics.
    pub error: Option<String>,
}

impl DiagnoseRealization {
    pub fn entropy(&self) -> Option<f64> {
        self.entropy_curve.last().copied()
    }

    fn failed(&self) -> bool {
        self.entropy_curve.is_empty()
    }
}

fn run_one(pt: &Point, r: usize, seed: u64, spec: &SweepSpec) -> DiagnoseRealization {
    let mut rec = DiagnoseRealization {
        point: pt.index,
        realization: r,
        seed,
        ct_fraction: f64::NAN,
        entropy_curve: Vec::new(),
        stats: None,
        magic: None,
        anti_flatness: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let (template, mut psi) = prepare(pt, spec.diagnose.input, seed)?;
        rec.ct_fraction = template.ct_fraction();
        let sub = Subsystem::first_half(pt.n)?;
        let mut curve = Vec::with_capacity(pt.depth + 1);
        let mut eigs = psi.reduced(&sub).eigenvalues()?;
        curve.push(entropy_from_eigenvalues(&eigs, EntropyOrder::VonNeumann)?);
        for layer in 0..pt.depth {
            template.apply_layer(&mut psi, layer)?;
            eigs = psi.reduced(&sub).eigenvalues()?;
            curve.push(entropy_from_eigenvalues(&eigs, EntropyOrder::VonNeumann)?);
        }
        rec.entropy_curve = curve;
        let spectrum = EntanglementSpectrum::from_eigenvalues(&eigs, DEFAULT_CUTOFF)?;
        rec.stats = Some(spacing_ratios(&spectrum)?);
        rec.anti_flatness = Some(anti_flatness_from_eigenvalues(&eigs));
        if spec.diagnose.magic {
            if pt.n <= PAULI_CAP {
                rec.magic = Some(mutual_magic(&psi, Some(&sub))?);
            } else {
                rec.error = Some(format!("magic skipped: N = {} above Pauli cap {PAULI_CAP}", pt.n));
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        warn!("point {} realization {r}: {e}", pt.index);
        rec.error = Some(e.to_string());
    }
    rec
}

/// Averages of one grid point.
#[derive(Clone, Debug)]
pub struct DiagnosePoint {
    pub point: Point,
    pub input: InitialState,
    pub realizations: usize,
    pub failed: usize,
    pub entropy: Option<Estimate>,
    pub r_available: usize,
    /// Ratios pooled over realizations.
    pub pooled: SpectrumStats,
    /// Spread of the per-realization means.
    pub mean_r_se: Option<f64>,
    pub degeneracy_fraction: Option<f64>,
    pub total_magic: Option<Estimate>,
    pub mutual_magic: Option<Estimate>,
    pub haar_mutual_magic: Option<f64>,
    pub delta_i: Option<RelativeGap>,
    pub delta_i_se: Option<f64>,
    pub anti_flatness: Option<Estimate>,
    pub entropy_curve: Vec<Option<Estimate>>,
}

fn summarize(pt: &Point, input: InitialState, runs: &[&DiagnoseRealization], haar: Option<f64>, bins: usize) -> Result<DiagnosePoint> {
    let ok: Vec<&&DiagnoseRealization> = runs.iter().filter(|r| !r.failed()).collect();
    let stats: Vec<SpectrumStats> = ok.iter().filter_map(|r| r.stats.clone()).collect();
    let pooled = SpectrumStats::pooled(&stats, bins)?;
    let mutual = estimate_of(ok.iter().map(|r| r.magic.map(|m| m.mutual_magic)));
    let (delta_i, delta_i_se) = match (mutual, haar) {
        (Some(m), Some(h)) if h > 0.0 => (Some(relative_gap(m.mean, h)?), Some(m.se / h)),
        _ => (None, None),
    };
    let entropy_curve = (0..=pt.depth)
        .map(|l| estimate_of(ok.iter().map(|r| r.entropy_curve.get(l).copied())))
        .collect();
    Ok(DiagnosePoint {
        point: *pt,
        input,
        realizations: runs.len(),
        failed: runs.len() - ok.len(),
        entropy: estimate_of(ok.iter().map(|r| r.entropy())),
        r_available: stats.iter().filter(|s| s.is_available()).count(),
        mean_r_se: se(estimate_of(stats.iter().map(|s| s.mean_r))),
        degeneracy_fraction: (!stats.is_empty()).then_some(pooled.degeneracy_fraction),
        pooled,
        total_magic: estimate_of(ok.iter().map(|r| r.magic.map(|m| m.total_magic))),
        mutual_magic: mutual,
        haar_mutual_magic: haar,
        delta_i,
        delta_i_se,
        anti_flatness: estimate_of(ok.iter().map(|r| r.anti_flatness)),
        entropy_curve,
    })
}

#[derive(Clone, Debug)]
pub struct DiagnoseOutput {
    pub realizations: Vec<DiagnoseRealization>,
    pub points: Vec<DiagnosePoint>,
    pub results: Table,
    pub summary: Table,
    pub entropy_curves: Table,
    pub r_histogram: Table,
}

impl DiagnoseOutput {
    pub fn write(&self, dir: &Path) -> Result<Vec<OutputFile>> {
        write_tables(dir, &[&self.results, &self.summary, &self.entropy_curves, &self.r_histogram])
    }
}

/// Runs the sweep on `jobs` workers. Haar references are cached under
/// `<out>/haar_cache`.
pub fn run(spec: &SweepSpec, jobs: usize) -> Result<DiagnoseOutput> {
    let d = &spec.diagnose;
    let points = expand_grid(&d.n, &d.d_over_n, &d.p);
    let pool = build_pool(jobs)?;
    let cache = HaarCache::new(spec.out.join("haar_cache"));

    let mut haar: BTreeMap<usize, Option<f64>> = BTreeMap::new();
    if d.magic {
        for &n in d.n.iter().filter(|&&n| n <= PAULI_CAP) {
            if haar.contains_key(&n) {
                continue;
            }
            info!("Haar reference N = {n}, {} samples", d.haar_samples);
            let r = pool.install(|| cache.load_or_compute(n, d.haar_samples, spec.seed))?;
            haar.insert(n, r.mean_mutual_magic);
        }
    }

    info!("diagnose: {} points x {} realizations on {jobs} workers", points.len(), spec.realizations);
    let realizations = run_realizations(&pool, &points, spec.realizations, spec.seed, |pt, r, seed| {
        run_one(pt, r, seed, spec)
    });

    let mut results = Table::new(DIAGNOSE_RESULTS);
    for rec in &realizations {
        let pt = &points[rec.point];
        let h = haar.get(&pt.n).copied().flatten();
        let m = rec.magic.as_ref();
        let delta = match (m, h) {
            (Some(m), Some(h)) if h > 0.0 => Some(relative_gap(m.mutual_magic, h)?.value),
            _ => None,
        };
        let st = rec.stats.as_ref();
        results.push(vec![
            rec.seed.to_string(),
            rec.point.to_string(),
            rec.realization.to_string(),
            pt.n.to_string(),
            pt.depth.to_string(),
            f(pt.d_over_n),
            f(pt.p),
            d.input.label().into(),
            f(rec.ct_fraction),
            opt(rec.entropy()),
            opt(st.and_then(|s| s.mean_r)),
            st.map_or(0, |s| s.r_values.len()).to_string(),
            opt(st.map(|s| s.degeneracy_fraction)),
            opt(m.map(|m| m.total_magic)),
            opt(m.map(|m| m.magic_m)),
            opt(m.map(|m| m.magic_r)),
            opt(m.map(|m| m.mutual_magic)),
            opt(delta),
            opt(rec.anti_flatness),
            rec.error.clone().unwrap_or_default(),
        ])?;
    }
    results.sort_by_columns(&["point", "realization"]);

    let mut summaries = Vec::with_capacity(points.len());
    let mut summary = Table::new(DIAGNOSE_SUMMARY);
    let mut curves = Table::new(ENTROPY_CURVES);
    let mut hist = Table::new(R_HISTOGRAM);
    for pt in &points {
        let runs: Vec<&DiagnoseRealization> = realizations.iter().filter(|r| r.point == pt.index).collect();
        let s = summarize(pt, d.input, &runs, haar.get(&pt.n).copied().flatten(), d.bins)?;
        summary.push(vec![
            pt.index.to_string(),
            pt.n.to_string(),
            pt.depth.to_string(),
            f(pt.d_over_n),
            f(pt.p),
            d.input.label().into(),
            s.realizations.to_string(),
            s.failed.to_string(),
            opt(mean(s.entropy)),
            opt(se(s.entropy)),
            s.r_available.to_string(),
            opt(s.pooled.mean_r),
            opt(s.mean_r_se),
            opt(s.pooled.kl_to_gue),
            opt(s.degeneracy_fraction),
            opt(mean(s.total_magic)),
            opt(se(s.total_magic)),
            opt(mean(s.mutual_magic)),
            opt(se(s.mutual_magic)),
            opt(s.haar_mutual_magic),
            opt(s.delta_i.map(|g| g.value)),
            opt(s.delta_i_se),
            s.delta_i.map(|g| g.exceeds_one.to_string()).unwrap_or_default(),
            opt(mean(s.anti_flatness)),
            opt(se(s.anti_flatness)),
        ])?;
        for (layer, e) in s.entropy_curve.iter().enumerate() {
            let x = layer as f64 / pt.n as f64;
            curves.push(vec![
                pt.n.to_string(),
                pt.depth.to_string(),
                f(pt.p),
                layer.to_string(),
                f(x),
                f((1.0 - pt.p) * x),
                opt(mean(*e)),
                opt(se(*e)),
            ])?;
        }
        if !s.pooled.r_values.is_empty() {
            for row in ratio_histogram(&s.pooled.r_values, d.bins)? {
                hist.push(vec![
                    pt.n.to_string(),
                    pt.depth.to_string(),
                    f(pt.p),
                    f(row.r_bin_center),
                    f(row.empirical_density),
                    f(row.surmise_density),
                ])?;
            }
        }
        summaries.push(s);
    }
    summary.sort_by_columns(&["point"]);
    curves.sort_by_columns(&["n", "depth", "p", "layer"]);
    hist.sort_by_columns(&["n", "depth", "p", "r_bin_center"]);

    Ok(DiagnoseOutput { realizations, points: summaries, results, summary, entropy_curves: curves, r_histogram: hist })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SweepSpec {
        let mut spec = SweepSpec::default();
        spec.realizations = 3;
        spec.out = std::env::temp_dir().join("pqrc-diagnose-unit");
        spec.diagnose.n = vec![4];
        spec.diagnose.p = vec![0.0, 0.5];
        spec.diagnose.haar_samples = 50;
        spec
    }

    #[test]
    fn stabilizer_point_has_no_magic() {
        let out = run(&tiny(), 1).unwrap();
        assert_eq!(out.results.len(), 6);
        let p0 = &out.points[0];
        assert_eq!(p0.failed, 0);
        assert!(p0.mutual_magic.unwrap().mean.abs() < 1e-8);
        assert!(p0.anti_flatness.unwrap().mean.abs() < 1e-8);
        assert_eq!(p0.entropy_curve.len(), 9);
        assert_eq!(p0.entropy_curve[0].unwrap().mean, 0.0);
        let g = p0.delta_i.unwrap();
        assert!((g.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn random_product_start_differs() {
        let mut spec = tiny();
        spec.diagnose.input = InitialState::RandomProduct;
        spec.diagnose.magic = false;
        let out = run(&spec, 1).unwrap();
        assert!(out.realizations.iter().all(|r| r.magic.is_none() && r.error.is_none()));
        assert!(out.points[0].entropy_curve[0].unwrap().mean.abs() < 1e-10);
        assert!(out.points[1].anti_flatness.unwrap().mean > 0.0);
    }
}
