//! End-to-end acceptance checks. Each test writes one `criterion N: PASS|FAIL`
//! line straight to standard output so it shows without `--nocapture`.
//!
//! `cargo test --test acceptance -- --ignored` adds the degree-7 kernel.

use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orthovar::interp::{exact_kernel, float_matrix, monomial_basis, numeric_kernel, ExactOptions, DEFAULT_TOL};
use orthovar::lattice::{integer_reconstruct, span_rank, ReconstructOptions};
use orthovar::naive::{all_naive_equations, naive_equation, naive_value, sign_product_squares, Axis};
use orthovar::ortho::{DoublyStochasticMatrix, Mat, PointSampler, ProjectivePoint};
use orthovar::poly::{rat, Polynomial, Ring};
use orthovar::variety::*;

fn report(criterion: u32, pass: bool, detail: &str) {
    let line = format!("criterion {criterion}: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthovar"))
}

fn sample_count(d: u32) -> usize {
    let cols = monomial_basis(10, d).len();
    cols + cols.div_ceil(4)
}

fn exact_dim(d: u32) -> usize {
    let pts: Vec<ProjectivePoint<BigRational>> = PointSampler::new(4, 100 + d as u64).points(sample_count(d));
    exact_kernel(&pts, d, &ExactOptions::default()).unwrap().dim()
}

/// The degree-6 kernel is shared by criteria 3 and 10.
fn degree_six_dim() -> usize {
    static DIM: OnceLock<usize> = OnceLock::new();
    *DIM.get_or_init(|| exact_dim(6))
}

#[test]
fn criterion_1_naive_quartic() {
    let t = Instant::now();
    // (y11 y12 + y21 y22 - (s - y11 - y21)(s - y12 - y22))^2 - 4 y11 y12 y21 y22
    let r = Ring::projective(3);
    let v = |k: usize| Polynomial::var(&r, k);
    let (y11, y12, y21, y22, s) = (v(0), v(1), v(2), v(3), v(4));
    let a = s.try_sub(&y11).unwrap().try_sub(&y21).unwrap();
    let b = s.try_sub(&y12).unwrap().try_sub(&y22).unwrap();
    let inner = y11.try_mul(&y12).unwrap().try_add(&y21.try_mul(&y22).unwrap()).unwrap().try_sub(&a.try_mul(&b).unwrap()).unwrap();
    let prod = y11.try_mul(&y12).unwrap().try_mul(&y21).unwrap().try_mul(&y22).unwrap();
    let displayed = inner.pow(2).try_sub(&prod.scale(&rat(4))).unwrap().normalized();

    let lib = naive_equation(3, Axis::Column, 1, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quartic.txt");
    let status = bin()
        .args(["naive", "--n", "3", "--axis", "column", "--i", "1", "--j", "2", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    let cli = Polynomial::from_text(&std::fs::read_to_string(&path).unwrap(), None).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let pass = status.success() && lib == displayed && cli == displayed && elapsed < 1.0;
    report(1, pass, &format!("{} terms, {elapsed:.2}s", lib.num_terms()));
    assert!(pass);
}

#[test]
fn criterion_2_naive_octic_term_counts() {
    let t = Instant::now();
    let mut counts: Vec<usize> = all_naive_equations(4).unwrap().iter().map(|e| e.3.num_terms()).collect();
    counts.sort_unstable();
    let expected: Vec<usize> = [vec![967; 6], vec![6760; 6]].concat();
    let elapsed = t.elapsed().as_secs_f64();
    let pass = counts == expected && elapsed < 10.0;
    report(2, pass, &format!("{counts:?} in {elapsed:.1}s"));
    assert!(pass);
}

#[test]
fn criterion_3_graded_dimensions() {
    let t = Instant::now();
    let mut dims: Vec<usize> = (1..=5).map(exact_dim).collect();
    dims.push(degree_six_dim());
    let pass = dims == [0, 0, 0, 0, 6, 60];
    report(3, pass, &format!("d = 1..6 -> {dims:?} in {:.0}s", t.elapsed().as_secs_f64()));
    assert!(pass);
}

#[test]
#[ignore = "heavy: degree-7 exact kernel"]
fn criterion_3_heavy_degree_seven() {
    let dim = exact_dim(7);
    report(3, dim == 330, &format!("d = 7 -> {dim}"));
    assert_eq!(dim, 330);
}

#[test]
fn criterion_4_quintic_reconstruction() {
    let t = Instant::now();
    let basis = monomial_basis(10, 5);
    let exact_pts: Vec<ProjectivePoint<BigRational>> = PointSampler::new(4, 41).points(sample_count(5));
    let exact = exact_kernel(&exact_pts, 5, &ExactOptions::default()).unwrap();
    let exact = exact.polynomials().unwrap().to_vec();

    let float_pts: Vec<ProjectivePoint<f64>> = PointSampler::new(4, 42).points(sample_count(5));
    let (m, fbasis) = float_matrix(&float_pts, 5).unwrap();
    let k = numeric_kernel(&m, DEFAULT_TOL).unwrap();
    let gap = k.gap();
    let kb = k.into_basis(4, 5, fbasis);
    let verify: Vec<ProjectivePoint<BigRational>> = PointSampler::new(4, 43).points(50);
    let lifted = integer_reconstruct(&kb, &verify, &ReconstructOptions::default()).unwrap().polynomials;

    let stacked: Vec<Polynomial> = exact.iter().chain(&lifted).cloned().collect();
    let rank = span_rank(&stacked, &basis).unwrap();
    let shipped = Equations::shipped().unwrap().quintics;
    let shipped_rank = span_rank(&[stacked.clone(), shipped].concat(), &basis).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut all_pass = true;
    for (i, f) in stacked.iter().enumerate() {
        let c = certify_identically_zero(f, 200, 1000 + i as u64).unwrap();
        all_pass &= c.passed;
        worst = worst.max(c.log10_failure_bound);
    }
    let pass = exact.len() == 6 && lifted.len() == 6 && rank == 6 && shipped_rank == 6 && all_pass && worst < -400.0;
    report(
        4,
        pass,
        &format!(
            "exact {} + lattice {} forms, stacked rank {rank}, with shipped {shipped_rank}, gap {gap:.1e}, \
             bound 10^{worst:.0}, {:.0}s",
            exact.len(),
            lifted.len(),
            t.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

const DIM4: [&str; 16] = [
    "(y_0, y_3, y_6, -y_2-y_5-y_8+y_9, -y_1-y_4-y_7+y_9)",
    "(y_0, y_2, y_4, y_7, -y_1+y_9)",
    "(y_2, y_5, y_6, y_7, -y_8+y_9)",
    "(y_2, y_3, y_4, y_8, -y_5+y_9)",
    "(y_1, y_2, y_3, y_6, -y_0+y_9)",
    "(y_0, y_1, y_2, -y_6-y_7-y_8+y_9, -y_3-y_4-y_5+y_9)",
    "(y_0+y_3+y_6-y_9, y_0+y_1+y_2-y_9, y_6+y_7+y_8-y_9, y_1+y_4+y_7-y_9, y_2+y_5+y_8-y_9)",
    "(y_0, y_3, y_7, y_8, -y_6+y_9)",
    "(y_6, y_7, y_8, -y_3-y_4-y_5+y_9, -y_0-y_1-y_2+y_9)",
    "(y_1, y_3, y_5, y_7, -y_4+y_9)",
    "(y_0, y_4, y_5, y_6, -y_3+y_9)",
    "(y_3, y_4, y_5, -y_6-y_7-y_8+y_9, -y_0-y_1-y_2+y_9)",
    "(y_0, y_1, y_5, y_8, -y_2+y_9)",
    "(y_1, y_4, y_7, -y_0-y_3-y_6+y_9, y_2+y_5+y_8-y_9)",
    "(y_2, y_5, y_8, -y_0-y_3-y_6+y_9, y_1+y_4+y_7-y_9)",
    "(y_1, y_4, y_6, y_8, -y_7+y_9)",
];

const DIM5: [&str; 15] = [
    "(-y_1+y_6, -y_0+y_7, -y_1-y_3-y_4-y_7+y_9, y_2-y_3-y_4+y_8)",
    "(-y_2+y_6, -y_0+y_8, y_1-y_3-y_5+y_7, -y_1-y_2-y_7-y_8+y_9)",
    "(-y_1+y_3, -y_0+y_4, -y_2-y_5+y_6+y_7, -y_2-y_3-y_4-y_5+y_9)",
    "(y_9, y_0+y_1, y_3+y_4, y_6+y_7)",
    "(-y_4+y_6, -y_3+y_7, -y_0-y_1+y_5+y_8, -y_3-y_5-y_6-y_8+y_9)",
    "(y_9, y_0+y_6, y_1+y_7, y_2+y_8)",
    "(-y_5+y_6, -y_3+y_8, -y_0-y_2-y_5-y_8+y_9, -y_0-y_2+y_4+y_7)",
    "(-y_2+y_4, -y_1+y_5, -y_0-y_3+y_7+y_8, -y_1-y_2-y_7-y_8+y_9)",
    "(y_9, y_3+y_6, y_4+y_7, y_5+y_8)",
    "(-y_5+y_7, -y_4+y_8, -y_1-y_2+y_3+y_6, -y_1-y_2-y_5-y_8+y_9)",
    "(-y_2+y_3, -y_0+y_5, -y_1-y_4+y_6+y_8, -y_2-y_5-y_6-y_8+y_9)",
    "(y_9, y_1+y_2, y_4+y_5, y_7+y_8)",
    "(-y_2+y_7, -y_1+y_8, y_0-y_4-y_5+y_6, -y_1-y_2-y_4-y_5+y_9)",
    "(y_9, y_0+y_2, y_3+y_5, y_6+y_8)",
    "(y_9, y_0+y_3, y_1+y_4, y_2+y_5)",
];

/// Structured components matched one-to-one with a listing.
fn matched(catalog: &[&ComponentDescription], listing: &[&str]) -> usize {
    let mut used = vec![false; catalog.len()];
    let mut count = 0;
    for text in listing {
        let ideal = parse_indexed_ideal(text).unwrap();
        if let Some(k) = (0..catalog.len()).find(|&k| !used[k] && same_linear_span(&catalog[k].generators, &ideal).unwrap()) {
            used[k] = true;
            count += 1;
        }
    }
    count
}

#[test]
fn criterion_5_component_suite() {
    let t = Instant::now();
    let catalog = component_catalog();
    let four: Vec<&ComponentDescription> = catalog.iter().filter(|c| c.dimension == 4).collect();
    let five: Vec<&ComponentDescription> = catalog.iter().filter(|c| c.dimension == 5).collect();
    let listed = matched(&four, &DIM4) + matched(&five, &DIM5);
    let relevant = five.iter().filter(|c| c.is_s_relevant()).count();
    let quintics = Equations::shipped().unwrap().quintics;
    let reports: Vec<ComponentReport> =
        catalog.iter().enumerate().map(|(k, c)| verify_component(c, &quintics, 500 + k as u64).unwrap()).collect();
    let confirmed = reports.iter().filter(|r| r.confirmed()).count();
    let elapsed = t.elapsed().as_secs_f64();
    let pass = four.len() == 16 && five.len() == 15 && listed == 31 && relevant == 9 && confirmed == 31 && elapsed < 600.0;
    report(
        5,
        pass,
        &format!("{listed}/31 match the listings, {confirmed}/31 contained with tangent dimension = dimension, {relevant} relevant, {elapsed:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_restriction_identity() {
    let t = Instant::now();
    let ks = octics(Axis::Column).unwrap();
    let reports: Vec<RestrictionReport> = component_catalog()
        .iter()
        .filter(|c| c.dimension == 4)
        .map(|c| restrict_octics(c, &ks).unwrap())
        .collect();
    let ok = reports.iter().filter(|r| r.holds()).count();
    let elapsed = t.elapsed().as_secs_f64();
    let pass = reports.len() == 16 && ok == 16 && elapsed < 300.0;
    report(6, pass, &format!("{ok}/16 restrictions are positive multiples of f^2, {elapsed:.1}s"));
    assert!(pass);
}

#[test]
fn criterion_7_invariants() {
    let got: Vec<(u64, u64)> = (2..=5)
        .map(|n| {
            let inv = invariants(n).unwrap();
            (inv.dim, u64::try_from(inv.degree).unwrap())
        })
        .collect();
    let out = bin().args(["invariants", "--n", "4"]).output().unwrap();
    let cli = String::from_utf8(out.stdout).unwrap();
    let pass = got == [(1, 1), (3, 4), (6, 40), (10, 1536)] && cli.trim() == "dim 6 deg 40";
    report(7, pass, &format!("{got:?}"));
    assert!(pass);
}

#[test]
fn criterion_8_counterexample() {
    let t = Instant::now();
    let j6 = counterexample_matrix(6).unwrap();
    let squares = sign_product_squares(6);
    let mut vanishing = 0;
    let mut total = 0;
    for axis in [Axis::Column, Axis::Row] {
        for i in 1..=6 {
            for j in i + 1..=6 {
                total += 1;
                if naive_value(&squares, j6.matrix(), axis, i, j).unwrap().is_zero() {
                    vanishing += 1;
                }
            }
        }
    }
    let cert = brute_force_membership(&j6, 0.0, false).unwrap();
    let hadamard = hadamard_search(6, false).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let pass = vanishing == total
        && cert.verdict == Verdict::NotOrthostochastic
        && cert.exact
        && cert.patterns == 1 << 25
        && hadamard.is_none()
        && elapsed < 900.0;
    report(
        8,
        pass,
        &format!("{vanishing}/{total} naive equations vanish, search says {}, no order-6 Hadamard: {}, {elapsed:.1}s", cert.verdict, hadamard.is_none()),
    );
    assert!(pass);
}

/// `J/4` plus a random zero-sum perturbation small enough to stay inside the
/// Birkhoff polytope.
fn perturbed_uniform(rng: &mut ChaCha8Rng) -> DoublyStochasticMatrix<BigRational> {
    let mut m = Mat::<BigRational>::from_fn(4, 4, |_, _| BigRational::new(1.into(), 4.into()));
    let mut e = Mat::<BigRational>::zeros(4, 4);
    for i in 0..3 {
        for j in 0..3 {
            e[(i, j)] = BigRational::new(rng.gen_range(-1000i64..=1000).into(), 40_000.into());
        }
    }
    for i in 0..3 {
        e[(i, 3)] = -(0..3).fold(BigRational::zero(), |a, j| a + &e[(i, j)]);
    }
    for j in 0..4 {
        e[(3, j)] = -(0..3).fold(BigRational::zero(), |a, i| a + &e[(i, j)]);
    }
    m = m.add(&e);
    DoublyStochasticMatrix::new(m).unwrap()
}

#[test]
fn criterion_9_membership_soundness() {
    let eqs = Equations::shipped().unwrap();
    let mut sampler = PointSampler::new(4, 9001);
    let mut positives = 0;
    for _ in 0..500 {
        let p = sampler.point::<BigRational>();
        let (a, _) = orthovar::ortho::embed_full(&p).unwrap();
        let ds = DoublyStochasticMatrix::new(a).unwrap();
        let brute = brute_force_membership(&ds, DEFAULT_MEMBERSHIP_TOL, false).unwrap();
        let eq = equation_membership(&p, &eqs, 0.0).unwrap();
        let float_eq = equation_membership(&p.to_f64(), &eqs, DEFAULT_MEMBERSHIP_TOL).unwrap();
        if brute.verdict == Verdict::Orthostochastic && eq.verdict == Verdict::OnVarietyOnly && float_eq.verdict == Verdict::OnVarietyOnly {
            positives += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9002);
    let mut negatives = 0;
    for _ in 0..500 {
        let ds = perturbed_uniform(&mut rng);
        let eq = equation_membership(&ds.project(), &eqs, 0.0).unwrap();
        if eq.verdict == Verdict::NotOrthostochastic && !eq.failed.is_empty() {
            negatives += 1;
        }
    }
    let pass = positives == 500 && negatives == 500;
    report(9, pass, &format!("{positives}/500 samples accepted by both tests, {negatives}/500 perturbations rejected"));
    assert!(pass);
}

#[test]
fn criterion_10_no_low_degree_syzygies() {
    let t = Instant::now();
    let quintics = Equations::shipped().unwrap().quintics;
    let r1 = multiplication_rank(&quintics, 1, 71).unwrap();
    let r2 = multiplication_rank(&quintics, 2, 72).unwrap();
    let d6 = degree_six_dim();
    let pass = r1 == 60 && r2 == 330 && r1 == d6;
    report(10, pass, &format!("ranks {r1} and {r2}, degree-6 kernel {d6}, {:.0}s", t.elapsed().as_secs_f64()));
    assert!(pass);
}
