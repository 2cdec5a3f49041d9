use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::modular::PrimeField;

fn power_table<T: Clone>(
    p: &Polynomial,
    point: &[T],
    one: T,
    mul: impl Fn(&T, &T) -> T,
) -> Result<Vec<Vec<T>>> {
    let nv = p.ring.nvars();
    if point.len() != nv {
        return Err(Error::DimensionMismatch { expected: nv, got: point.len() });
    }
    Ok((0..nv)
        .map(|v| {
            let top = p.degree_in(v) as usize;
            let mut pw = Vec::with_capacity(top + 1);
            pw.push(one.clone());
            for k in 0..top {
                let next = mul(&pw[k], &point[v]);
                pw.push(next);
            }
            pw
        })
        .collect())
}

fn monomial_value<T: Clone>(m: &Monomial, table: &[Vec<T>], one: &T, mul: impl Fn(&T, &T) -> T) -> T {
    let mut acc = one.clone();
    for (v, &e) in m.0.iter().enumerate() {
        if e > 0 {
            acc = mul(&acc, &table[v][e as usize]);
        }
    }
    acc
}

impl Polynomial {
    /// Exact value at a rational point. Runs in integers: with `x = a / D`
    /// and coefficient denominators cleared by `L`, the value is
    /// `Σ L c a^m D^(deg - |m|) / (L D^deg)`.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        let Some(deg) = self.total_degree() else {
            if point.len() != self.ring.nvars() {
                return Err(Error::DimensionMismatch { expected: self.ring.nvars(), got: point.len() });
            }
            return Ok(BigRational::zero());
        };
        let den = point.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = point.iter().map(|x| x.numer() * (&den / x.denom())).collect();
        let lcoef = self.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let one = BigInt::one();
        let table = power_table(self, &ints, one.clone(), |a, b| a * b)?;
        let mut den_pows = vec![one.clone()];
        for k in 0..deg as usize {
            let next = &den_pows[k] * &den;
            den_pows.push(next);
        }
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let scaled = c.numer() * (&lcoef / c.denom());
            acc += scaled * monomial_value(m, &table, &one, |a, b| a * b) * &den_pows[(deg - m.degree()) as usize];
        }
        Ok(BigRational::new(acc, lcoef * &den_pows[deg as usize]))
    }

    /// Exact value at an integer point; coefficients must be integers.
    pub fn eval_integer(&self, point: &[BigInt]) -> Result<BigInt> {
        let one = BigInt::one();
        let table = power_table(self, point, one.clone(), |a, b| a * b)?;
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return Err(Error::NotIntegral);
            }
            acc += c.numer() * monomial_value(m, &table, &one, |a, b| a * b);
        }
        Ok(acc)
    }

    pub fn eval_mod(&self, point: &[u64], field: &PrimeField) -> Result<u64> {
        let table = power_table(self, point, 1u64, |a, b| field.mul(*a, *b))?;
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let cm = field.from_rational(c)?;
            let mv = monomial_value(m, &table, &1u64, |a, b| field.mul(*a, *b));
            acc = field.add(acc, field.mul(cm, mv));
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        Ok(self.eval_f64_scaled(point)?.0)
    }

    /// Value together with the largest absolute term contribution.
    pub fn eval_f64_scaled(&self, point: &[f64]) -> Result<(f64, f64)> {
        let table = power_table(self, point, 1.0f64, |a, b| a * b)?;
        let mut acc = 0.0;
        let mut scale = 0.0f64;
        for (m, c) in &self.terms {
            let term = rational_to_f64(c) * monomial_value(m, &table, &1.0, |a, b| a * b);
            acc += term;
            scale = scale.max(term.abs());
        }
        Ok((acc, scale))
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Ring};
    use proptest::prelude::*;

    #[test]
    fn simple_values() {
        let r = Ring::projective(2);
        let y = Polynomial::var(&r, 0);
        let s = Polynomial::var(&r, 1);
        let p = &y.pow(2) + &s.pow(2);
        assert_eq!(p.eval_rational(&[rat(1), rat(2)]).unwrap(), rat(5));
        let q = &p + &Polynomial::constant(&r, rat(7));
        assert_eq!(q.eval_rational(&[rat(0), rat(0)]).unwrap(), rat(7));
        assert_eq!(p.eval_integer(&[BigInt::from(1), BigInt::from(2)]).unwrap(), BigInt::from(5));
        assert_eq!(p.eval_f64(&[1.0, 2.0]).unwrap(), 5.0);
        assert!(p.eval_rational(&[rat(1)]).is_err());
    }

    #[test]
    fn modulus_dividing_denominator() {
        let r = Ring::projective(2);
        let p = Polynomial::var(&r, 0).scale(&BigRational::new(BigInt::from(1), BigInt::from(101)));
        let f = PrimeField::new(101);
        assert!(matches!(p.eval_mod(&[1, 1], &f), Err(Error::DenominatorDivisible(101))));
    }

    fn small_rat() -> impl Strategy<Value = BigRational> {
        (-30i64..30, 1i64..12).prop_map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    fn poly3() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec(((0u16..3, 0u16..3, 0u16..3), small_rat()), 0..6).prop_map(|ts| {
            let r = Ring::new(["a", "b", "c"]);
            Polynomial::from_terms(&r, ts.into_iter().map(|((x, y, z), c)| (Monomial::new(vec![x, y, z]), c)))
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn modular_evaluation_matches_exact(p in poly3(), pt in proptest::collection::vec(small_rat(), 3)) {
            let f = PrimeField::new(1_000_000_007);
            let exact = p.eval_rational(&pt).unwrap();
            let pt_mod: Vec<u64> = pt.iter().map(|x| f.from_rational(x).unwrap()).collect();
            prop_assert_eq!(p.eval_mod(&pt_mod, &f).unwrap(), f.from_rational(&exact).unwrap());
        }

        #[test]
        fn evaluation_is_multiplicative(p in poly3(), q in poly3(), pt in proptest::collection::vec(small_rat(), 3)) {
            let lhs = (&p * &q).eval_rational(&pt).unwrap();
            prop_assert_eq!(lhs, p.eval_rational(&pt).unwrap() * q.eval_rational(&pt).unwrap());
        }

        #[test]
        fn ring_axioms(p in poly3(), q in poly3(), r in poly3()) {
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            let ring = p.ring().clone();
            let mut a = std::collections::BTreeMap::new();
            a.insert(1usize, &Polynomial::var(&ring, 0) + &Polynomial::constant(&ring, rat(2)));
            prop_assert_eq!((&p * &q).substitute(&ring, &a).unwrap(),
                &p.substitute(&ring, &a).unwrap() * &q.substitute(&ring, &a).unwrap());
        }

        #[test]
        fn homogenize_then_dehomogenize(p in poly3()) {
            let p = p.dehomogenize(2);
            let h = p.homogenize(2).unwrap();
            prop_assert!(h.is_homogeneous());
            prop_assert_eq!(h.dehomogenize(2), p);
        }

        #[test]
        fn normalization_is_idempotent(p in poly3()) {
            let n = p.normalized();
            prop_assert!(n.is_normalized());
            prop_assert_eq!(n.normalized(), n.clone());
            let rev = Polynomial::from_terms(p.ring(),
                p.terms().rev().map(|(m, c)| (m.clone(), c.clone()))).unwrap();
            prop_assert_eq!(rev.normalized(), n);
        }
    }
}
