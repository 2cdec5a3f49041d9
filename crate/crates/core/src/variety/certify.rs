//! Randomized identity test for forms on `Z_n`.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ortho::{cayley, squaring_project, Mat, ProjectivePoint};
use crate::poly::Polynomial;

/// Skew entries are `k / CERTIFY_DEN` with `|k| <= CERTIFY_RANGE`.
pub const CERTIFY_DEN: i64 = 1000;
pub const CERTIFY_RANGE: i64 = 500_000;
pub const DEFAULT_TRIALS: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct ZeroCertificate {
    pub passed: bool,
    pub trials: usize,
    /// `log10` of the chance that a nonzero form vanished at every sample.
    pub log10_failure_bound: f64,
    /// Coordinates of a point where the form is nonzero.
    #[serde(skip)]
    pub witness: Option<ProjectivePoint<BigRational>>,
    #[serde(skip)]
    pub witness_value: Option<BigRational>,
}

fn sample_set_size() -> f64 {
    (2 * CERTIFY_RANGE + 1) as f64
}

/// Point of `Z_n` from a skew matrix with entries drawn from the sample set;
/// `None` when `I + B` is singular.
pub fn certify_sample<R: Rng>(n: usize, rng: &mut R) -> Option<ProjectivePoint<BigRational>> {
    let mut b = Mat::<BigRational>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = BigRational::new(rng.gen_range(-CERTIFY_RANGE..=CERTIFY_RANGE).into(), CERTIFY_DEN.into());
            b[(j, i)] = -v.clone();
            b[(i, j)] = v;
        }
    }
    cayley(&b).ok().map(|v| squaring_project(&v))
}

/// Evaluates `f` at `trials` exact Cayley samples. Cleared of the
/// denominator `det(I + B)^2`, each coordinate is a polynomial of degree
/// `2n` in the skew entries, so a nonzero `f` of degree `d` pulls back to a
/// nonzero polynomial of degree at most `2nd` and vanishes at one sample with
/// probability at most `2nd / |S|`.
pub fn certify_identically_zero(f: &Polynomial, trials: usize, seed: u64) -> Result<ZeroCertificate> {
    let nvars = f.ring().nvars();
    let n = (1..=16).find(|n| (n - 1) * (n - 1) + 1 == nvars).filter(|&n| n >= 2).ok_or(Error::Invalid(format!(
        "ring with {nvars} variables is not a coordinate ring of Z_n"
    )))?;
    let degree = f.total_degree().unwrap_or(0);
    let per_trial = (2 * n as u32 * degree) as f64 / sample_set_size();
    let bound = if f.is_zero() { f64::NEG_INFINITY } else { trials as f64 * per_trial.min(1.0).log10() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < trials {
        let Some(p) = certify_sample(n, &mut rng) else { continue };
        done += 1;
        let v = f.eval_rational(p.coords())?;
        if !v.is_zero() {
            return Ok(ZeroCertificate {
                passed: false,
                trials: done,
                log10_failure_bound: 0.0,
                witness: Some(p),
                witness_value: Some(v),
            });
        }
    }
    Ok(ZeroCertificate { passed: true, trials, log10_failure_bound: bound, witness: None, witness_value: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naive::{naive_equation, Axis};
    use crate::poly::Ring;
    use num_traits::One;

    #[test]
    fn zero_passes_trivially() {
        let c = certify_identically_zero(&Polynomial::zero(&Ring::projective(4)), 5, 1).unwrap();
        assert!(c.passed);
        assert_eq!(c.log10_failure_bound, f64::NEG_INFINITY);
    }

    #[test]
    fn s_fails_at_once() {
        let ring = Ring::projective(4);
        let c = certify_identically_zero(&Polynomial::var(&ring, 9), 200, 1).unwrap();
        assert!(!c.passed);
        assert_eq!(c.trials, 1);
        assert!(c.witness_value.unwrap().is_one());
    }

    #[test]
    fn naive_equations_pass() {
        let q = naive_equation(3, Axis::Column, 1, 2).unwrap();
        let c = certify_identically_zero(&q, 200, 7).unwrap();
        assert!(c.passed);
        // (2 * 3 * 4 / 1000001)^200
        assert!((c.log10_failure_bound - 200.0 * (24.0f64 / 1_000_001.0).log10()).abs() < 1e-9);
        let r = naive_equation(4, Axis::Row, 2, 3).unwrap();
        assert!(certify_identically_zero(&r, 20, 8).unwrap().passed);
    }

    #[test]
    fn near_miss_is_caught() {
        let ring = Ring::projective(3);
        let q = naive_equation(3, Axis::Column, 1, 2).unwrap();
        let bumped = q.try_add(&Polynomial::var(&ring, 0).pow(4)).unwrap();
        assert!(!certify_identically_zero(&bumped, 200, 3).unwrap().passed);
    }
}
