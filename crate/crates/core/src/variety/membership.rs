//! Orthostochasticity by sign-pattern search, and the equation test.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::Equations;
use crate::error::{Error, Result};
use crate::ortho::{DoublyStochasticMatrix, Mat, ProjectivePoint, Scalar};

/// Largest order searched without the override flag.
pub const MAX_SEARCH_N: usize = 6;
/// Default orthogonality tolerance in float mode.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Orthostochastic,
    NotOrthostochastic,
    /// All equations vanish; says nothing about a real signed square root.
    OnVarietyOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Orthostochastic => "orthostochastic",
            Verdict::NotOrthostochastic => "not-orthostochastic",
            Verdict::OnVarietyOnly => "on-variety-only",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    Equations,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipCertificate {
    pub verdict: Verdict,
    /// `n x n` sign pattern of the signed square root, when one was found.
    pub signs: Option<Vec<Vec<i8>>>,
    /// Largest column dot product of the reported (or best) pattern.
    pub residual: f64,
    pub method: Method,
    /// Whether the dot products were decided in exact arithmetic.
    pub exact: bool,
    /// Patterns enumerated.
    pub patterns: u64,
}

/// Column dot products of the signed square root, as integers (exact) or
/// floats. `w[k][i][j]` is `sqrt(a_ki a_kj)`.
enum Weights {
    /// Integer weights and the common denominator they were scaled by.
    Exact(usize, Vec<i128>, f64),
    Float(usize, Vec<f64>),
}

impl Weights {
    fn n(&self) -> usize {
        match self {
            Weights::Exact(n, _, _) | Weights::Float(n, _) => *n,
        }
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (a, b) = (q.numer(), q.denom());
    let (ra, rb) = (a.sqrt(), b.sqrt());
    (&ra * &ra == *a && &rb * &rb == *b).then(|| BigRational::new(ra, rb))
}

fn exact_weights(a: &Mat<BigRational>) -> Option<Weights> {
    let n = a.rows();
    let mut w: Vec<BigRational> = vec![BigRational::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                w[(k * n + i) * n + j] = rational_sqrt(&(&a[(k, i)] * &a[(k, j)]))?;
            }
        }
    }
    let lcm = w.iter().fold(BigInt::from(1), |l, q| l.lcm(q.denom()));
    let limit = BigInt::from(1i128 << 120) / BigInt::from(n as u64 + 1);
    let ints: Option<Vec<i128>> = w
        .iter()
        .map(|q| {
            let v = q.numer() * (&lcm / q.denom());
            if v.abs() >= limit {
                None
            } else {
                v.to_i128()
            }
        })
        .collect();
    let den = crate::poly::rational_to_f64(&BigRational::from_integer(lcm));
    ints.map(|v| Weights::Exact(n, v, den))
}

fn float_weights<T: Scalar>(a: &Mat<T>) -> Weights {
    let n = a.rows();
    let roots: Vec<f64> = (0..n * n).map(|x| a[(x / n, x % n)].to_f64().max(0.0).sqrt()).collect();
    let mut w = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                w[(k * n + i) * n + j] = roots[k * n + i] * roots[k * n + j];
            }
        }
    }
    Weights::Float(n, w)
}

/// Free signs are `σ_ki` for `k, i >= 1`, bit `(k-1)(n-1) + (i-1)`; bit set
/// means `-1`.
fn sign_of(bits: u64, n: usize, k: usize, i: usize) -> i64 {
    if k == 0 || i == 0 {
        1
    } else if bits >> ((k - 1) * (n - 1) + (i - 1)) & 1 == 1 {
        -1
    } else {
        1
    }
}

struct Hit {
    bits: u64,
    residual: f64,
}

/// Gray-code walk over the low `free` bits with the high bits fixed to
/// `prefix`. Keeps the column dot products up to date in O(n) per flip.
/// Returns the first zero pattern or the smallest residual seen.
fn scan_chunk(weights: &Weights, prefix: u64, free: u32, tol: f64) -> (Option<u64>, f64) {
    let n = weights.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pidx = |i: usize, j: usize| {
        let (i, j) = (i.min(j), i.max(j));
        pairs.iter().position(|&p| p == (i, j)).unwrap()
    };
    let mut pair_of = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pair_of[i * n + j] = pidx(i, j);
            }
        }
    }
    let mut bits = prefix;
    let mut best = f64::INFINITY;
    match weights {
        Weights::Exact(_, w, den) => {
            let mut dots: Vec<i128> = pairs
                .iter()
                .map(|&(i, j)| {
                    (0..n).map(|k| (sign_of(bits, n, k, i) * sign_of(bits, n, k, j)) as i128 * w[(k * n + i) * n + j]).sum()
                })
                .collect();
            let scale = *den;
            let mut nonzero = dots.iter().filter(|d| **d != 0).count();
            for step in 0u64..(1u64 << free) {
                if step > 0 {
                    let flip = step.trailing_zeros() as usize;
                    bits ^= 1 << flip;
                    let (k, i) = (flip / (n - 1) + 1, flip % (n - 1) + 1);
                    let si = sign_of(bits, n, k, i) as i128;
                    for j in 0..n {
                        if j == i {
                            continue;
                        }
                        let p = pair_of[i * n + j];
                        let before = dots[p] != 0;
                        dots[p] += 2 * si * sign_of(bits, n, k, j) as i128 * w[(k * n + i) * n + j];
                        let after = dots[p] != 0;
                        if before != after {
                            if after {
                                nonzero += 1;
                            } else {
                                nonzero -= 1;
                            }
                        }
                    }
                }
                if nonzero == 0 {
                    return (Some(bits), 0.0);
                }
                let r = dots.iter().map(|d| d.unsigned_abs()).max().unwrap_or(0) as f64 / scale;
                best = best.min(r);
            }
        }
        Weights::Float(_, w) => {
            let mut dots: Vec<f64> = pairs
                .iter()
                .map(|&(i, j)| (0..n).map(|k| (sign_of(bits, n, k, i) * sign_of(bits, n, k, j)) as f64 * w[(k * n + i) * n + j]).sum())
                .collect();
            for step in 0u64..(1u64 << free) {
                if step > 0 {
                    let flip = step.trailing_zeros() as usize;
                    bits ^= 1 << flip;
                    let (k, i) = (flip / (n - 1) + 1, flip % (n - 1) + 1);
                    let si = sign_of(bits, n, k, i) as f64;
                    for j in 0..n {
                        if j != i {
                            dots[pair_of[i * n + j]] += 2.0 * si * sign_of(bits, n, k, j) as f64 * w[(k * n + i) * n + j];
                        }
                    }
                }
                let r = dots.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                if r <= tol {
                    // recompute to shed accumulated rounding before accepting
                    let fresh = pairs
                        .iter()
                        .map(|&(i, j)| {
                            (0..n)
                                .map(|k| (sign_of(bits, n, k, i) * sign_of(bits, n, k, j)) as f64 * w[(k * n + i) * n + j])
                                .sum::<f64>()
                                .abs()
                        })
                        .fold(0.0f64, f64::max);
                    if fresh <= tol {
                        return (Some(bits), fresh);
                    }
                }
                best = best.min(r);
            }
        }
    }
    (None, best)
}

fn search(weights: &Weights, tol: f64) -> (Option<Hit>, f64, u64) {
    let n = weights.n();
    let free = ((n - 1) * (n - 1)) as u32;
    let split = free.min(4);
    let low = free - split;
    let results: Vec<(Option<u64>, f64)> =
        (0u64..1 << split).into_par_iter().map(|hi| scan_chunk(weights, hi << low, low, tol)).collect();
    let best = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hit = results.iter().find_map(|r| r.0.map(|bits| Hit { bits, residual: r.1 }));
    (hit, best, 1u64 << free)
}

fn sign_matrix(bits: u64, n: usize) -> Vec<Vec<i8>> {
    (0..n).map(|k| (0..n).map(|i| sign_of(bits, n, k, i) as i8).collect()).collect()
}

fn check_size(n: usize, allow_large: bool) -> Result<()> {
    if n > MAX_SEARCH_N && !allow_large {
        return Err(Error::SizeCap { n, cap: MAX_SEARCH_N });
    }
    if n == 0 || (n - 1) * (n - 1) > 62 {
        return Err(Error::Invalid(format!("cannot enumerate signs for n = {n}")));
    }
    Ok(())
}

/// Searches the `2^{(n-1)^2}` sign patterns with nonnegative first row and
/// column for a signed entrywise square root with orthonormal columns.
///
/// Exact matrices whose row-wise entry products are all rational squares are
/// decided in integer arithmetic; every other input runs in floating point
/// with tolerance `tol`.
pub fn brute_force_membership<T: Scalar>(
    a: &DoublyStochasticMatrix<T>,
    tol: f64,
    allow_large: bool,
) -> Result<MembershipCertificate> {
    let n = a.n();
    check_size(n, allow_large)?;
    let exact = if T::EXACT {
        let q = a.matrix().map(|x| parse_exact(x));
        exact_weights(&q)
    } else {
        None
    };
    let is_exact = exact.is_some();
    let weights = exact.unwrap_or_else(|| float_weights(a.matrix()));
    if n == 1 {
        return Ok(MembershipCertificate {
            verdict: Verdict::Orthostochastic,
            signs: Some(vec![vec![1]]),
            residual: 0.0,
            method: Method::BruteForce,
            exact: is_exact,
            patterns: 1,
        });
    }
    let (hit, best, patterns) = search(&weights, tol);
    Ok(match hit {
        Some(h) => MembershipCertificate {
            verdict: Verdict::Orthostochastic,
            signs: Some(sign_matrix(h.bits, n)),
            residual: h.residual,
            method: Method::BruteForce,
            exact: is_exact,
            patterns,
        },
        None => MembershipCertificate {
            verdict: Verdict::NotOrthostochastic,
            signs: None,
            residual: best,
            method: Method::BruteForce,
            exact: is_exact,
            patterns,
        },
    })
}

fn parse_exact<T: Scalar>(x: &T) -> BigRational {
    crate::ortho::parse_rational(&x.format_entry()).expect("exact entries format as rationals")
}

/// Normalized search for an `m x m` Hadamard matrix (first row and column
/// all `+1`).
pub fn hadamard_search(m: usize, allow_large: bool) -> Result<Option<Vec<Vec<i8>>>> {
    check_size(m, allow_large)?;
    if m == 1 {
        return Ok(Some(vec![vec![1]]));
    }
    let weights = Weights::Exact(m, vec![1; m * m * m], 1.0);
    let (hit, _, _) = search(&weights, 0.0);
    Ok(hit.map(|h| {
        // orthogonal columns of a square ±1 matrix imply orthogonal rows
        let s = sign_matrix(h.bits, m);
        (0..m).map(|i| (0..m).map(|j| s[j][i]).collect()).collect()
    }))
}

/// Result of evaluating the equations of `Z_4` at a point.
#[derive(Clone, Debug, Serialize)]
pub struct EquationReport {
    pub verdict: Verdict,
    /// Names of the equations that do not vanish (`J1..J6`, `K1..K3`).
    pub failed: Vec<String>,
    /// Largest `|value| / scale` over the equations.
    pub residual: f64,
}

/// Tests the six quintics and three octics at `p`: exactly for rational
/// points, and relative to the largest term contribution for floats.
pub fn equation_membership<T: Scalar>(p: &ProjectivePoint<T>, eqs: &Equations, tol: f64) -> Result<EquationReport> {
    if p.n() != 4 {
        return Err(Error::Invalid("equations are for n = 4".into()));
    }
    let named = eqs
        .quintics
        .iter()
        .enumerate()
        .map(|(i, q)| (format!("J{}", i + 1), q))
        .chain(eqs.octics.iter().enumerate().map(|(i, k)| (format!("K{}", i + 1), k)));
    let mut failed = Vec::new();
    let mut residual = 0.0f64;
    if T::EXACT {
        let coords: Vec<BigRational> = p.coords().iter().map(parse_exact).collect();
        for (name, f) in named {
            let v = f.eval_rational(&coords)?;
            if !v.is_zero() {
                let (val, scale) = f.eval_f64_scaled(&p.to_f64().coords().to_vec())?;
                residual = residual.max(if scale > 0.0 { (val / scale).abs() } else { 1.0 });
                failed.push(name);
            }
        }
    } else {
        let coords: Vec<f64> = p.coords().iter().map(Scalar::to_f64).collect();
        for (name, f) in named {
            let (val, scale) = f.eval_f64_scaled(&coords)?;
            let r = if scale > 0.0 { val.abs() / scale } else { 0.0 };
            residual = residual.max(r);
            if r > tol {
                failed.push(name);
            }
        }
    }
    let verdict = if failed.is_empty() { Verdict::OnVarietyOnly } else { Verdict::NotOrthostochastic };
    Ok(EquationReport { verdict, failed, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{embed_full, PointSampler};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn exact_ds(rows: Vec<Vec<BigRational>>) -> DoublyStochasticMatrix<BigRational> {
        DoublyStochasticMatrix::new(Mat::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn identity_is_orthostochastic() {
        let id = DoublyStochasticMatrix::new(Mat::<BigRational>::identity(4)).unwrap();
        let c = brute_force_membership(&id, DEFAULT_MEMBERSHIP_TOL, false).unwrap();
        assert_eq!(c.verdict, Verdict::Orthostochastic);
        assert!(c.exact);
        assert!(c.signs.unwrap().iter().all(|r| r.iter().all(|&s| s == 1)));
    }

    #[test]
    fn uniform_four_uses_a_hadamard_pattern() {
        let c = brute_force_membership(&DoublyStochasticMatrix::<BigRational>::uniform(4), 0.0, false).unwrap();
        assert_eq!(c.verdict, Verdict::Orthostochastic);
        let s = c.signs.unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                let dot: i32 = (0..4).map(|k| (s[k][i] * s[k][j]) as i32).sum();
                assert_eq!(dot, 0);
            }
        }
    }

    #[test]
    fn uniform_six_is_not() {
        let c = brute_force_membership(&DoublyStochasticMatrix::<BigRational>::uniform(6), 0.0, false).unwrap();
        assert_eq!(c.verdict, Verdict::NotOrthostochastic);
        assert!(c.exact);
        assert_eq!(c.patterns, 1 << 25);
        assert!(c.residual > 0.0);
    }

    #[test]
    fn hadamard_orders() {
        for m in [1, 2, 4] {
            let h = hadamard_search(m, false).unwrap().expect("exists");
            for i in 0..m {
                for j in i + 1..m {
                    let dot: i32 = (0..m).map(|k| (h[i][k] * h[j][k]) as i32).sum();
                    assert_eq!(dot, 0);
                }
            }
        }
        assert!(hadamard_search(3, false).unwrap().is_none());
        assert!(hadamard_search(5, false).unwrap().is_none());
        assert!(matches!(hadamard_search(7, false), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn van_der_waerden_three() {
        // (1/2)(J - I) in 3x3 is doubly stochastic but not orthostochastic
        let rows = (0..3).map(|i| (0..3).map(|j| if i == j { q(0, 1) } else { q(1, 2) }).collect()).collect();
        let c = brute_force_membership(&exact_ds(rows), 0.0, false).unwrap();
        assert_eq!(c.verdict, Verdict::NotOrthostochastic);
    }

    #[test]
    fn float_samples_pass_and_flip_with_permutation() {
        let mut sampler = PointSampler::new(4, 77);
        for _ in 0..20 {
            let p = sampler.point::<f64>();
            let (a, _) = embed_full(&p).unwrap();
            let ds = DoublyStochasticMatrix::new(a).unwrap();
            let c = brute_force_membership(&ds, DEFAULT_MEMBERSHIP_TOL, false).unwrap();
            assert_eq!(c.verdict, Verdict::Orthostochastic);
            assert!(!c.exact);
            let perm = ds.permute(&[2, 0, 3, 1], &[1, 3, 0, 2]).transpose();
            assert_eq!(brute_force_membership(&perm, DEFAULT_MEMBERSHIP_TOL, false).unwrap().verdict, Verdict::Orthostochastic);
        }
    }

    #[test]
    fn exact_samples_fall_back_to_float() {
        let p = PointSampler::new(4, 3).point::<BigRational>();
        let (a, _) = embed_full(&p).unwrap();
        let c = brute_force_membership(&DoublyStochasticMatrix::new(a).unwrap(), DEFAULT_MEMBERSHIP_TOL, false).unwrap();
        assert_eq!(c.verdict, Verdict::Orthostochastic);
        // entries are squares of rationals, so the products are squares too
        assert!(c.exact);
        assert_eq!(c.residual, 0.0);
    }
}
