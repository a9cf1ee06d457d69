//! Closed-form values checked against the library.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use pqrc_core::circuit::CliffordTable;
use pqrc_core::magic::{haar_reference, mutual_magic, sre2_pure};
use pqrc_core::qcore::{GateMatrix, QuantumState, StateVector, Subsystem, C64};
use pqrc_core::spectra::{gue_mean_r, gue_normalization, gue_surmise_pdf, poisson_surmise_pdf, POISSON_MEAN_R};

fn t_plus() -> StateVector {
    let ph = C64::from_polar(FRAC_1_SQRT_2, PI / 4.0);
    StateVector::from_amplitudes(1, vec![C64::new(FRAC_1_SQRT_2, 0.0), ph]).unwrap()
}

fn midpoint<F: Fn(f64) -> f64>(f: F, k: usize) -> f64 {
    let h = 1.0 / k as f64;
    (0..k).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
fn gue_surmise_constants() {
    assert!((gue_normalization() - 2.0 * PI / (81.0 * 3f64.sqrt())).abs() < 1e-12);
    assert!((gue_mean_r() - (2.0 * 3f64.sqrt() / PI - 0.5)).abs() < 1e-10);
    assert!((midpoint(gue_surmise_pdf, 20_000) - 1.0).abs() < 1e-8);
}

#[test]
fn poisson_surmise_constants() {
    assert!((POISSON_MEAN_R - (2.0 * LN_2 - 1.0)).abs() < 1e-15);
    assert!((midpoint(poisson_surmise_pdf, 20_000) - 1.0).abs() < 1e-8);
    assert!((midpoint(|r| r * poisson_surmise_pdf(r), 20_000) - POISSON_MEAN_R).abs() < 1e-8);
}

#[test]
fn sre_of_t_states_is_additive() {
    let one = sre2_pure(&t_plus()).unwrap();
    assert!((one - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    let amps: Vec<C64> = {
        let a = t_plus();
        let v = a.amplitudes();
        (0..4).map(|i| v[i & 1] * v[i >> 1]).collect()
    };
    let two = StateVector::from_amplitudes(2, amps).unwrap();
    let rep = mutual_magic(&two, Some(&Subsystem::new(2, &[0]).unwrap())).unwrap();
    assert!((rep.total_magic - 2.0 * one).abs() < 1e-12);
    assert!(rep.mutual_magic.abs() < 1e-12);
}

#[test]
fn ct_on_plus_plus() {
    // |++> under CT: amplitudes (1, 1, 1, e^{i pi/4}) / 2.
    let mut psi = StateVector::zero(2).unwrap();
    psi.apply_gate(&GateMatrix::h(), &[0]).unwrap();
    psi.apply_gate(&GateMatrix::h(), &[1]).unwrap();
    psi.apply_gate(&GateMatrix::ct(), &[0, 1]).unwrap();
    // Naive <psi|P|psi> over all 16 Pauli strings.
    let amps = psi.amplitudes();
    let d = 4usize;
    let mut fourth = 0.0;
    for idx in 0..16usize {
        let (p0, p1) = (idx & 3, idx >> 2);
        let mut ev = C64::new(0.0, 0.0);
        for j in 0..d {
            let (a0, a1) = (j & 1, j >> 1);
            let (b0, f0) = pauli_col(p0, a0);
            let (b1, f1) = pauli_col(p1, a1);
            ev += amps[b0 | (b1 << 1)].conj() * f0 * f1 * amps[j];
        }
        fourth += ev.re.powi(4);
    }
    let want = -(fourth / d as f64).log2();
    assert!((sre2_pure(&psi).unwrap() - want).abs() < 1e-12);
}

/// Column `a` of a single-qubit Pauli: the row it lands on and the entry.
fn pauli_col(p: usize, a: usize) -> (usize, C64) {
    match p {
        0 => (a, C64::new(1.0, 0.0)),
        1 => (a ^ 1, C64::new(1.0, 0.0)),
        2 => (a ^ 1, if a == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) }),
        _ => (a, if a == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) }),
    }
}

#[test]
fn clifford_table_is_the_full_group() {
    let table = CliffordTable::shared();
    assert_eq!(table.len(), 11_520);
    assert!(table.gates().iter().all(|g| g.is_unitary()));
    let cx = GateMatrix::cx();
    let swap = GateMatrix::swap();
    assert!(table.index_of(&cx).is_some());
    assert!(table.index_of(&swap).is_some());
    assert!(table.index_of(&GateMatrix::ct()).is_none());
}

#[test]
fn haar_purity_matches_page() {
    for n in [4usize, 6] {
        let r = haar_reference(n, 400, 99).unwrap();
        let (da, db) = ((1usize << (n / 2)) as f64, (1usize << (n - n / 2)) as f64);
        let page = (da + db) / (da * db + 1.0);
        assert!((r.mean_purity - page).abs() < 4.0 * r.se_purity + 1e-3, "N={n}: {} vs {page}", r.mean_purity);
    }
}

#[test]
fn haar_magic_matches_moment() {
    // E sum_P <P>^4 = 4 d / (d + 3) for Haar states, so M concentrates at log2((d + 3) / 4).
    let n = 8;
    let r = haar_reference(n, 200, 5).unwrap();
    let d = (1usize << n) as f64;
    let want = ((d + 3.0) / 4.0).log2();
    assert!((r.mean_total_magic.unwrap() - want).abs() < 0.05, "{:?} vs {want}", r.mean_total_magic);
}
