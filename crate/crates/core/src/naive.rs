//! The naive equations `C_{i,j}` and `R_{i,j}`: eliminate the signs from
//! the orthogonality of the entrywise square roots of two columns (or rows)
//! of a doubly stochastic matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ortho::{symbolic_completion, Mat, Scalar};
use crate::poly::{rat, Monomial, Polynomial, Ring};

/// Largest `n` accepted without the override flag.
pub const MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Column,
    Row,
}

impl Axis {
    pub fn letter(self) -> char {
        match self {
            Axis::Column => 'C',
            Axis::Row => 'R',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Column => "column",
            Axis::Row => "row",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "column" | "col" | "c" | "C" => Ok(Axis::Column),
            "row" | "r" | "R" => Ok(Axis::Row),
            _ => Err(Error::Invalid(format!("unknown axis `{s}`"))),
        }
    }
}

/// Signs `ε_1, ..., ε_m`, each `±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Invalid("sign entries must be +1 or -1".into()));
        }
        Ok(SignVector(entries))
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    /// All `2^len` sign vectors.
    pub fn all(len: usize) -> impl Iterator<Item = SignVector> {
        (0u64..1 << len).map(move |bits| {
            SignVector((0..len).map(|k| if bits >> k & 1 == 1 { -1 } else { 1 }).collect())
        })
    }
}

/// Ring `u1, ..., un` with `u_k` standing for `t_k^2`.
pub fn square_ring(n: usize) -> Arc<Ring> {
    Ring::new((1..=n).map(|k| format!("u{k}")))
}

/// The sign product written in `u_k = t_k^2`.
///
/// With `P_m(x) = Π (x + ε_1 t_2 + ... + ε_m t_{m+1})` we have
/// `P_m(x) = P_{m-1}(x + t) P_{m-1}(x - t)` for `t = t_{m+1}`. Writing
/// `P_{m-1}` as `F(x^2)` and expanding `F(X + u + w)` around `X + u` with
/// `w = 2xt`, `w^2 = 4Xu`, the odd powers of `w` cancel and only squares
/// survive: `P_m = A^2 - 4 X u B^2`.
pub fn sign_product_squares(n: usize) -> Polynomial {
    assert!(n >= 2, "sign product needs n >= 2");
    let ring = square_ring(n);
    let x = Polynomial::var(&ring, 0);
    // P_1 = X - u2
    let mut f = &x - &Polynomial::var(&ring, 1);
    for m in 2..n {
        let u = Polynomial::var(&ring, m);
        let shift: BTreeMap<usize, Polynomial> = [(0, &x + &u)].into();
        let four_xu = (&x * &u).scale(&rat(4));
        let mut a = Polynomial::zero(&ring);
        let mut b = Polynomial::zero(&ring);
        let mut deriv = f.clone();
        let mut factorial = BigRational::one();
        let mut w_pow = Polynomial::one(&ring);
        let mut k = 0u32;
        while !deriv.is_zero() {
            if k > 0 {
                factorial = factorial * rat(k as i64);
            }
            let term = deriv
                .substitute(&ring, &shift)
                .expect("same ring")
                .scale(&(BigRational::one() / &factorial));
            if k % 2 == 0 {
                a = &a + &(&term * &w_pow);
            } else {
                b = &b + &(&term * &w_pow);
                w_pow = &w_pow * &four_xu;
            }
            deriv = deriv.derivative(0);
            k += 1;
        }
        f = &(&a * &a) - &(&four_xu * &(&b * &b));
    }
    f
}

/// `Π_ε (t_1 + Σ_k ε_k t_{k+1})` over all `ε ∈ {±1}^{n-1}`, in `t_1..t_n`.
pub fn sign_product(n: usize) -> Polynomial {
    let squares = sign_product_squares(n);
    let ring = Ring::sign_ring(n);
    let terms = squares.terms().map(|(m, c)| {
        let doubled: Vec<u16> = m.exponents().iter().map(|e| 2 * e).collect();
        (Monomial::new(doubled), c.clone())
    });
    Polynomial::from_terms(&ring, terms).expect("ring sizes agree")
}

/// The sign product by multiplying out every linear factor.
pub fn sign_product_expanded(n: usize) -> Polynomial {
    let ring = Ring::sign_ring(n);
    let mut acc = Polynomial::one(&ring);
    for eps in SignVector::all(n - 1) {
        let mut coeffs = vec![rat(0); n];
        coeffs[0] = rat(1);
        for (k, &e) in eps.entries().iter().enumerate() {
            coeffs[k + 1] = rat(e as i64);
        }
        acc = &acc * &Polynomial::linear(&ring, &coeffs).expect("length n");
    }
    acc
}

fn check_indices(n: usize, i: usize, j: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::IndexOutOfRange(format!("n = {n} must be at least 2")));
    }
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return Err(Error::IndexOutOfRange(format!("pair ({i}, {j}) for n = {n}")));
    }
    Ok(())
}

/// `C_{i,j}` or `R_{i,j}` in the ring of [`Ring::projective`], normalized.
/// The indices are 1-based and unordered. Errors for `n > MAX_N`.
pub fn naive_equation(n: usize, axis: Axis, i: usize, j: usize) -> Result<Polynomial> {
    if n > MAX_N {
        return Err(Error::SizeCap { n, cap: MAX_N });
    }
    naive_equation_uncapped(n, axis, i, j)
}

pub fn naive_equation_uncapped(n: usize, axis: Axis, i: usize, j: usize) -> Result<Polynomial> {
    check_indices(n, i, j)?;
    let (i, j) = (i.min(j) - 1, i.max(j) - 1);
    let v = symbolic_completion(n);
    let ring = Ring::projective(n);
    let squares = sign_product_squares(n);
    let assignment: BTreeMap<usize, Polynomial> = (0..n)
        .map(|k| {
            let prod = match axis {
                Axis::Column => &v[k][i] * &v[k][j],
                Axis::Row => &v[i][k] * &v[j][k],
            };
            (k, prod)
        })
        .collect();
    Ok(squares.substitute(&ring, &assignment)?.normalized())
}

/// Every `C_{i,j}` then every `R_{i,j}` for `i < j`, built in parallel.
pub fn all_naive_equations(n: usize) -> Result<Vec<(Axis, usize, usize, Polynomial)>> {
    if n > MAX_N {
        return Err(Error::SizeCap { n, cap: MAX_N });
    }
    let mut jobs = Vec::new();
    for axis in [Axis::Column, Axis::Row] {
        for i in 1..=n {
            for j in i + 1..=n {
                jobs.push((axis, i, j));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(axis, i, j)| naive_equation(n, axis, i, j).map(|p| (axis, i, j, p)))
        .collect()
}

/// Value of a naive equation at a concrete matrix, through the square form
/// with `u_k = a_{k,i} a_{k,j}` (columns) or `a_{i,k} a_{j,k}` (rows). Agrees
/// with evaluating [`naive_equation`] at the matrix's point up to the
/// normalization scalar, and stays cheap for large `n`.
pub fn naive_value<T: Scalar>(squares: &Polynomial, a: &Mat<T>, axis: Axis, i: usize, j: usize) -> Result<T> {
    let n = a.rows();
    check_indices(n, i, j)?;
    if squares.ring().nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: squares.ring().nvars() });
    }
    let (i, j) = (i - 1, j - 1);
    let u: Vec<T> = (0..n)
        .map(|k| match axis {
            Axis::Column => a[(k, i)].clone() * a[(k, j)].clone(),
            Axis::Row => a[(i, k)].clone() * a[(j, k)].clone(),
        })
        .collect();
    let mut total = T::zero();
    for (m, c) in squares.terms() {
        let mut term = T::from_frac(1, 1);
        for (k, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                term = term * u[k].clone();
            }
        }
        total = total + T::from_rational(c) * term;
    }
    Ok(total)
}

/// Whether all naive equations vanish (exactly, or within `tol` relative to
/// the largest term in float mode) at the matrix.
pub fn satisfies_naive<T: Scalar>(a: &Mat<T>, tol: f64) -> Result<bool> {
    let n = a.rows();
    let squares = sign_product_squares(n);
    for axis in [Axis::Column, Axis::Row] {
        for i in 1..=n {
            for j in i + 1..=n {
                let v = naive_value(&squares, a, axis, i, j)?;
                if !v.near_zero(tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{PointSampler, ProjectivePoint};
    use num_traits::Zero;

    fn parse(ring: &Arc<Ring>, text: &str) -> Polynomial {
        // tiny parser for sums of signed monomials, e.g. "t1^2 - 4 t1 t2"
        let mut acc = Polynomial::zero(ring);
        for raw in text.replace('-', "+-").split('+') {
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let mut term = Polynomial::one(ring);
            for f in raw.split_whitespace() {
                if let Some(rest) = f.strip_prefix('-') {
                    term = term.scale(&rat(-1));
                    if rest.is_empty() {
                        continue;
                    }
                    term = &term * &factor(ring, rest);
                } else {
                    term = &term * &factor(ring, f);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    fn factor(ring: &Arc<Ring>, f: &str) -> Polynomial {
        if let Ok(c) = f.parse::<i64>() {
            return Polynomial::constant(ring, rat(c));
        }
        let (v, e) = f.split_once('^').map_or((f, 1), |(v, e)| (v, e.parse().unwrap()));
        Polynomial::var_named(ring, v).unwrap().pow(e)
    }

    #[test]
    fn sign_product_small_cases() {
        let r2 = Ring::sign_ring(2);
        assert_eq!(sign_product(2), parse(&r2, "t1^2 - t2^2"));
        let r3 = Ring::sign_ring(3);
        let inner = parse(&r3, "t1^2 + t2^2 - t3^2");
        let expected = &(&inner * &inner) - &parse(&r3, "4 t1^2 t2^2");
        assert_eq!(sign_product(3), expected);
        let r4 = Ring::sign_ring(4);
        let inner = parse(&r4, "t1^2 + t2^2 - t3^2 - t4^2");
        let mid = &(&(&inner * &inner) - &parse(&r4, "4 t1^2 t2^2")) - &parse(&r4, "4 t3^2 t4^2");
        let expected = &(&mid * &mid) - &parse(&r4, "64 t1^2 t2^2 t3^2 t4^2");
        assert_eq!(sign_product(4), expected);
    }

    #[test]
    fn square_form_matches_linear_factors() {
        for n in 2..=5 {
            assert_eq!(sign_product(n), sign_product_expanded(n), "n = {n}");
        }
    }

    #[test]
    fn sign_product_shape() {
        for n in 2..=6 {
            let p = sign_product(n);
            assert_eq!(p.homogeneous_degree(), Some(1 << (n - 1)));
            assert!(p.terms().all(|(m, _)| m.exponents().iter().all(|e| e % 2 == 0)));
            // symmetric under swapping t2 and t3
            if n >= 3 {
                let ring = Ring::sign_ring(n);
                let swap: BTreeMap<usize, Polynomial> =
                    [(1, Polynomial::var(&ring, 2)), (2, Polynomial::var(&ring, 1))].into();
                assert_eq!(p.substitute(&ring, &swap).unwrap(), p);
            }
        }
    }

    #[test]
    fn n2_is_zero() {
        assert!(naive_equation(2, Axis::Column, 1, 2).unwrap().is_zero());
        assert!(naive_equation(2, Axis::Row, 2, 1).unwrap().is_zero());
    }

    #[test]
    fn n3_quartic() {
        // (s^2 - s(a+b+c+d) + ad + bc)^2 - 4abcd with a=y11, b=y12, c=y21, d=y22
        let ring = Ring::projective(3);
        let inner = parse(&ring, "s^2 - s y11 - s y12 - s y21 - s y22 + y11 y22 + y12 y21");
        let expected = (&(&inner * &inner) - &parse(&ring, "4 y11 y12 y21 y22")).normalized();
        assert_eq!(naive_equation(3, Axis::Column, 1, 2).unwrap(), expected);
        assert_eq!(naive_equation(3, Axis::Row, 1, 2).unwrap(), expected);
    }

    #[test]
    fn index_errors_and_cap() {
        assert!(matches!(naive_equation(3, Axis::Column, 0, 1), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(naive_equation(3, Axis::Column, 2, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(naive_equation(3, Axis::Row, 1, 4), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(naive_equation(7, Axis::Row, 1, 2), Err(Error::SizeCap { n: 7, cap: 6 })));
        assert!(SignVector::new(vec![1, 0]).is_err());
        assert_eq!(SignVector::all(3).count(), 8);
    }

    #[test]
    fn symmetric_in_pair_order() {
        assert_eq!(naive_equation(4, Axis::Column, 3, 1).unwrap(), naive_equation(4, Axis::Column, 1, 3).unwrap());
    }

    #[test]
    fn vanish_on_samples_and_transpose_duality() {
        for n in [3, 4] {
            let eqs = all_naive_equations(n).unwrap();
            let mut sampler = PointSampler::new(n, 100 + n as u64);
            for _ in 0..10 {
                let p: ProjectivePoint<BigRational> = sampler.point();
                for (_, _, _, e) in &eqs {
                    assert!(e.eval_rational(p.coords()).unwrap().is_zero());
                }
            }
            // a doubly stochastic point that is not orthostochastic
            let m = n - 1;
            let mut coords: Vec<BigRational> = (0..m * m).map(|k| BigRational::new((k as i64 % 3).into(), 7.into())).collect();
            coords.push(BigRational::one());
            let p = ProjectivePoint::new(n, coords).unwrap();
            let pt = p.transpose();
            for (axis, i, j, e) in &eqs {
                if *axis == Axis::Row {
                    let c = eqs.iter().find(|(a, ii, jj, _)| *a == Axis::Column && ii == i && jj == j).unwrap();
                    assert_eq!(e.eval_rational(p.coords()).unwrap(), c.3.eval_rational(pt.coords()).unwrap());
                }
            }
        }
    }

    #[test]
    fn value_through_square_form_agrees() {
        let squares = sign_product_squares(4);
        let eq = naive_equation(4, Axis::Column, 2, 4).unwrap();
        let point = |num: fn(i64) -> i64| {
            let mut c: Vec<BigRational> = (1..=9).map(|k| BigRational::new(num(k).into(), 9.into())).collect();
            c.push(BigRational::one());
            ProjectivePoint::new(4, c).unwrap()
        };
        let ratio = |p: &ProjectivePoint<BigRational>| {
            let (a, _) = crate::ortho::embed_full(p).unwrap();
            eq.eval_rational(p.coords()).unwrap() / naive_value(&squares, &a, Axis::Column, 2, 4).unwrap()
        };
        // the ratio is the normalization scalar, independent of the point
        assert_eq!(ratio(&point(|k| k % 4)), ratio(&point(|k| k % 3 + 1)));
        let p: ProjectivePoint<BigRational> = PointSampler::new(4, 8).point();
        let (b, _) = crate::ortho::embed_full(&p).unwrap();
        assert!(naive_value(&squares, &b, Axis::Column, 2, 4).unwrap().is_zero());
        let f = b.map(Scalar::to_f64);
        assert!(naive_value(&squares, &f, Axis::Row, 1, 3).unwrap().abs() < 1e-12);
    }
}
