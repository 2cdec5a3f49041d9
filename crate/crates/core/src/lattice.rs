//! Exact integral LLL reduction and the lift of approximate kernel vectors
//! to integer equations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interp::{eval_integer_vectors, KernelBasis};
use crate::ortho::ProjectivePoint;
use crate::poly::{Monomial, Polynomial, Ring};

/// Integer basis in row convention with reduction parameter `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerLattice {
    basis: Vec<Vec<BigInt>>,
    delta: BigRational,
}

impl IntegerLattice {
    pub fn new(basis: Vec<Vec<BigInt>>, delta: BigRational) -> Result<Self> {
        let quarter = BigRational::new(1.into(), 4.into());
        if delta <= quarter || delta >= BigRational::one() {
            return Err(Error::Invalid("delta must lie in (1/4, 1)".into()));
        }
        if let Some(first) = basis.first() {
            if let Some(bad) = basis.iter().find(|b| b.len() != first.len()) {
                return Err(Error::DimensionMismatch { expected: first.len(), got: bad.len() });
            }
        }
        Ok(IntegerLattice { basis, delta })
    }

    /// `delta = 99/100`.
    pub fn with_default_delta(basis: Vec<Vec<BigInt>>) -> Result<Self> {
        IntegerLattice::new(basis, BigRational::new(99.into(), 100.into()))
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::with_default_delta(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Checks size reduction and the Lovász condition with exact rational
    /// Gram-Schmidt.
    pub fn is_reduced(&self) -> bool {
        let Some((mu, norms)) = gram_schmidt(&self.basis) else { return false };
        let half = BigRational::new(1.into(), 2.into());
        for i in 0..mu.len() {
            for j in 0..i {
                if mu[i][j].abs() > half {
                    return false;
                }
            }
            if i > 0 {
                let m = &mu[i][i - 1];
                if norms[i] < (&self.delta - m * m) * &norms[i - 1] {
                    return false;
                }
            }
        }
        true
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rational Gram-Schmidt coefficients and squared norms; `None` when the
/// rows are dependent.
fn gram_schmidt(b: &[Vec<BigInt>]) -> Option<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let k = b.len();
    let mut mu = vec![vec![BigRational::zero(); k]; k];
    let mut norms: Vec<BigRational> = Vec::with_capacity(k);
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut v: Vec<BigRational> = b[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for j in 0..i {
            let num: BigRational = b[i].iter().zip(&star[j]).map(|(x, y)| y * x).sum();
            mu[i][j] = num / &norms[j];
            for (vi, sj) in v.iter_mut().zip(&star[j]) {
                *vi -= &mu[i][j] * sj;
            }
        }
        let nrm: BigRational = v.iter().map(|x| x * x).sum();
        if nrm.is_zero() {
            return None;
        }
        norms.push(nrm);
        star.push(v);
    }
    Some((mu, norms))
}

/// Reduced lattice plus the unimodular transform `U` with `U * B = B'`.
#[derive(Clone, Debug)]
pub struct LllOutput {
    pub lattice: IntegerLattice,
    pub transform: Vec<Vec<BigInt>>,
}

fn round_div(a: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to a/d for d > 0
    let two = BigInt::from(2);
    (a * &two + d).div_floor(&(d * two))
}

/// Integral LLL with exact integer Gram-Schmidt bookkeeping (subdeterminants
/// `d_i` and scaled coefficients `λ_ij = d_j μ_ij`), deterministic in the
/// input order.
pub fn lll_reduce(lattice: &IntegerLattice) -> Result<LllOutput> {
    let n = lattice.basis.len();
    let mut b = lattice.basis.clone();
    let mut h: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    if n == 0 {
        return Ok(LllOutput { lattice: lattice.clone(), transform: h });
    }
    let (a, bd) = (lattice.delta.numer().clone(), lattice.delta.denom().clone());
    // 1-based d with d[0] = 1, lambda[i][j] for j < i (0-based rows)
    let mut d: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    d[0] = BigInt::one();
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[1] = dot(&b[0], &b[0]);
    if d[1].is_zero() {
        return Err(Error::DependentRows);
    }
    let mut k = 1usize;
    let mut kmax = 0usize;

    let red = |k: usize, l: usize, b: &mut Vec<Vec<BigInt>>, h: &mut Vec<Vec<BigInt>>, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt]| {
        let dl = &d[l + 1];
        if BigInt::from(2) * lam[k][l].abs() > *dl {
            let q = round_div(&lam[k][l], dl);
            let (bl, hl) = (b[l].clone(), h[l].clone());
            for (x, y) in b[k].iter_mut().zip(&bl) {
                *x -= &q * y;
            }
            for (x, y) in h[k].iter_mut().zip(&hl) {
                *x -= &q * y;
            }
            lam[k][l] -= &q * dl;
            for i in 0..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(Error::DependentRows);
                    }
                    d[k + 1] = u;
                }
            }
        }
        loop {
            red(k, k - 1, &mut b, &mut h, &mut lam, &d);
            let lhs = &bd * &d[k + 1] * &d[k - 1];
            let rhs = &a * &d[k] * &d[k] - &bd * &lam[k][k - 1] * &lam[k][k - 1];
            if lhs < rhs {
                // swap k and k-1
                b.swap(k, k - 1);
                h.swap(k, k - 1);
                for j in 0..k - 1 {
                    let t = lam[k][j].clone();
                    lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
                }
                let l = lam[k][k - 1].clone();
                let bnew = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
                for i in k + 1..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
                    lam[i][k - 1] = (&bnew * &t + &l * &lam[i][k]) / &d[k + 1];
                }
                d[k] = bnew;
                if k > 1 {
                    k -= 1;
                }
            } else {
                for l in (0..k - 1).rev() {
                    red(k, l, &mut b, &mut h, &mut lam, &d);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(LllOutput { lattice: IntegerLattice { basis: b, delta: lattice.delta.clone() }, transform: h })
}

/// Exact determinant of a square integer matrix (fraction-free Bareiss).
pub fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact rank of a rational matrix by fraction-free elimination.
pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for r in rank + 1..a.len() {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &pivot;
            for j in c..cols {
                let t = &f * &a[rank][j];
                a[r][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}

/// `round(10^(digits+1) * round(x, digits))` as an integer.
pub fn scale_round(x: f64, digits: u32) -> BigInt {
    let r = (x * 10f64.powi(digits as i32)).round();
    let r = BigInt::from(r.to_i128().unwrap_or(0));
    r * BigInt::from(10)
}

/// Stacks an identity block over the scaled data (one relation per lattice
/// row, data in the trailing columns) and LLL-reduces it. Each returned row
/// starts with the integer coefficients of a candidate relation.
pub fn relation_lattice(data: &[Vec<f64>], digits: u32) -> Result<Vec<Vec<BigInt>>> {
    let rows = data.len();
    let rows_i: Vec<Vec<BigInt>> = data
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v: Vec<BigInt> = (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect();
            v.extend(row.iter().map(|&x| scale_round(x, digits)));
            v
        })
        .collect();
    let out = lll_reduce(&IntegerLattice::with_default_delta(rows_i)?)?;
    Ok(out.lattice.basis)
}

/// Row-reduces float vectors with complete pivoting. Returns the reduced rows
/// (identity on the pivot columns) and the pivot columns.
fn float_rref(vectors: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut a = vectors.to_vec();
    let k = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::with_capacity(k);
    for r in 0..k {
        debug_assert!(a[r].len() == cols);
        let (mut br, mut bc, mut best) = (r, 0, -1.0f64);
        for (i, row) in a.iter().enumerate().skip(r) {
            for (j, &x) in row.iter().enumerate() {
                if !pivots.contains(&j) && x.abs() > best {
                    (br, bc, best) = (i, j, x.abs());
                }
            }
        }
        a.swap(r, br);
        let p = a[r][bc];
        for x in a[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r {
                let f = row[bc];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                row[bc] = 0.0;
            }
        }
        a[r][bc] = 1.0;
        pivots.push(bc);
    }
    (a, pivots)
}

#[derive(Clone, Debug)]
pub struct ReconstructOptions {
    pub digits: u32,
    /// Non-pivot columns in the first lattice; doubled until every candidate verifies.
    pub initial_columns: usize,
    pub max_rounds: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { digits: 10, initial_columns: 0, max_rounds: 8 }
    }
}

/// Outcome of [`integer_reconstruct`].
#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Verified integer forms, normalized.
    pub polynomials: Vec<Polynomial>,
    /// Lattice dimension of the final round.
    pub lattice_dim: usize,
    pub rounds: usize,
}

/// Lifts approximate kernel vectors to integer forms.
///
/// The vectors are brought to reduced row echelon form with pivots `P`. An
/// integer vector of their span is fixed by its entries on `P`, so integer
/// relations are searched in the lattice whose rows are the unknowns on `P`
/// and on a set `T` of further columns, with data `R[:, T]` and `-e_j`. The
/// leading reduced rows give candidates, which are extended to all columns,
/// rounded, and verified by exact evaluation at `verify` points.
pub fn integer_reconstruct(
    kernel: &KernelBasis,
    verify: &[ProjectivePoint<BigRational>],
    opts: &ReconstructOptions,
) -> Result<Reconstruction> {
    let vectors = kernel.float_vectors().ok_or_else(|| Error::Invalid("expected a float kernel".into()))?;
    let k = vectors.len();
    let cols = kernel.basis.len();
    let ring = Ring::projective(kernel.n);
    if k == 0 {
        return Ok(Reconstruction { polynomials: Vec::new(), lattice_dim: 0, rounds: 0 });
    }
    let (r, pivots) = float_rref(vectors);
    let others: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let verify_ints: Vec<Vec<BigInt>> = verify.iter().map(ProjectivePoint::integer_coords).collect();
    let mut t = if opts.initial_columns > 0 { opts.initial_columns } else { 3 * k + 10 };
    let mut last_err = String::from("no candidate verified");
    for round in 1..=opts.max_rounds {
        let t_cols: Vec<usize> = spread(&others, t);
        let m = t_cols.len();
        // rows: P unknowns then T unknowns; columns: one per t in T
        let mut data: Vec<Vec<f64>> = Vec::with_capacity(k + m);
        for row in &r {
            data.push(t_cols.iter().map(|&c| row[c]).collect());
        }
        for j in 0..m {
            data.push((0..m).map(|i| if i == j { -1.0 } else { 0.0 }).collect());
        }
        let reduced = relation_lattice(&data, opts.digits)?;
        let mut found: Vec<(Vec<BigInt>, Polynomial)> = Vec::new();
        for row in reduced.iter().take(k) {
            let coeffs: Vec<f64> = row[..k].iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let full: Vec<f64> = (0..cols).map(|c| (0..k).map(|i| coeffs[i] * r[i][c]).sum()).collect();
            if full.iter().any(|x| (x - x.round()).abs() > 1e-3 || !x.is_finite()) {
                continue;
            }
            let ints: Vec<BigInt> = full.iter().map(|x| BigInt::from(x.round() as i128)).collect();
            if ints.iter().all(Zero::is_zero) {
                continue;
            }
            let vals = eval_integer_vectors(std::slice::from_ref(&ints), &kernel.basis, &verify_ints);
            if vals.iter().any(|v| !v[0].is_zero()) {
                continue;
            }
            let poly = integer_polynomial(&ring, &kernel.basis, &ints)?;
            found.push((ints, poly));
        }
        let rank = rank_rational(
            &found.iter().map(|(v, _)| v.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect::<Vec<_>>(),
        );
        if found.len() == k && rank == k {
            return Ok(Reconstruction {
                polynomials: found.into_iter().map(|(_, p)| p).collect(),
                lattice_dim: k + m,
                rounds: round,
            });
        }
        last_err = format!("{} of {k} candidates verified with {m} extra columns", found.len());
        if m == others.len() {
            break;
        }
        t = (2 * t).min(others.len());
    }
    Err(Error::Reconstruction(last_err))
}

fn spread(cols: &[usize], count: usize) -> Vec<usize> {
    let count = count.min(cols.len());
    if count == 0 {
        return Vec::new();
    }
    (0..count).map(|i| cols[i * cols.len() / count]).collect()
}

fn integer_polynomial(ring: &std::sync::Arc<Ring>, basis: &[Monomial], ints: &[BigInt]) -> Result<Polynomial> {
    let coeffs: Vec<BigRational> = ints.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    Ok(Polynomial::from_coefficient_vector(ring, basis, &coeffs)?.normalized())
}

/// Exact rank of the coefficient matrix of several forms over a shared basis.
pub fn span_rank(polys: &[Polynomial], basis: &[Monomial]) -> Result<usize> {
    let rows = polys.iter().map(|p| p.coefficient_vector(basis)).collect::<Result<Vec<_>>>()?;
    Ok(rank_rational(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn norm2(v: &[BigInt]) -> BigInt {
        dot(v, v)
    }

    #[test]
    fn identity_is_fixed() {
        let id: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| (i == j) as i64).collect()).collect();
        let out = lll_reduce(&IntegerLattice::from_i64(&id).unwrap()).unwrap();
        assert_eq!(out.lattice.basis(), &big(&id)[..]);
    }

    #[test]
    fn shortest_vector_matches_search() {
        let rows = vec![vec![1, 0, 1000], vec![0, 1, 1001]];
        let out = lll_reduce(&IntegerLattice::from_i64(&rows).unwrap()).unwrap();
        assert!(out.lattice.is_reduced());
        let mut best: Option<i64> = None;
        for x in -10i64..=10 {
            for y in -10i64..=10 {
                if x == 0 && y == 0 {
                    continue;
                }
                let v = [x, y, 1000 * x + 1001 * y];
                let n2: i64 = v.iter().map(|a| a * a).sum();
                best = Some(best.map_or(n2, |b| b.min(n2)));
            }
        }
        assert_eq!(norm2(&out.lattice.basis()[0]), BigInt::from(best.unwrap()));
    }

    #[test]
    fn scaling_commutes() {
        let rows = vec![vec![3, 7, 11], vec![2, -5, 8], vec![9, 1, -4]];
        let a = lll_reduce(&IntegerLattice::from_i64(&rows).unwrap()).unwrap();
        let scaled: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| 3 * x).collect()).collect();
        let b = lll_reduce(&IntegerLattice::from_i64(&scaled).unwrap()).unwrap();
        let times3: Vec<Vec<BigInt>> = a.lattice.basis().iter().map(|r| r.iter().map(|x| x * 3).collect()).collect();
        assert_eq!(b.lattice.basis(), &times3[..]);
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6]];
        assert!(matches!(lll_reduce(&IntegerLattice::from_i64(&rows).unwrap()), Err(Error::DependentRows)));
        assert!(IntegerLattice::new(big(&rows), BigRational::one()).is_err());
        assert!(IntegerLattice::from_i64(&[vec![1], vec![1, 2]]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(det_bigint(&big(&[vec![2, 1], vec![1, 3]])), BigInt::from(5));
        assert_eq!(det_bigint(&big(&[vec![0, 1], vec![1, 0]])), BigInt::from(-1));
        assert_eq!(det_bigint(&big(&[vec![1, 2], vec![2, 4]])), BigInt::zero());
        assert_eq!(det_bigint(&big(&[vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, 5]])), BigInt::from(-9));
    }

    #[test]
    fn finds_integer_relation() {
        // 3 x - 7 y + 2 z = 0 with x = 1, y = sqrt(2), z = (7 sqrt 2 - 3) / 2
        let y = 2f64.sqrt();
        let z = (7.0 * y - 3.0) / 2.0;
        let rows = relation_lattice(&[vec![1.0], vec![y], vec![z]], 10).unwrap();
        let rel: Vec<i64> = rows[0][..3].iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(rel == vec![3, -7, 2] || rel == vec![-3, 7, -2], "{rel:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn reduction_is_certified_and_unimodular(
            rows in proptest::collection::vec(proptest::collection::vec(-60i64..60, 5), 4)
        ) {
            let lat = IntegerLattice::from_i64(&rows).unwrap();
            match lll_reduce(&lat) {
                Ok(out) => {
                    prop_assert!(out.lattice.is_reduced());
                    prop_assert_eq!(det_bigint(&out.transform).abs(), BigInt::one());
                    // U * B = B'
                    for (u, row) in out.transform.iter().zip(out.lattice.basis()) {
                        for c in 0..5 {
                            let v: BigInt = u.iter().zip(lat.basis()).map(|(x, b)| x * &b[c]).sum();
                            prop_assert_eq!(&v, &row[c]);
                        }
                    }
                    let again = lll_reduce(&lat).unwrap();
                    prop_assert_eq!(again.lattice.basis(), out.lattice.basis());
                }
                Err(Error::DependentRows) => {
                    let rat: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
                    prop_assert!(rank_rational(&rat) < 4);
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
