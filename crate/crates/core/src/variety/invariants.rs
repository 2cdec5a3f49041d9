use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::interp::{binomial, monomial_basis};
use crate::lattice::det_bigint;
use crate::modular::{random_primes, ModMatrix, PrimeField};
use crate::ortho::{DoublyStochasticMatrix, Mat};
use crate::poly::{Monomial, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietyInvariants {
    pub n: usize,
    pub dim: u64,
    #[serde(serialize_with = "ser_big")]
    pub degree: BigInt,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Dimension `C(n,2)` and degree
/// `2^{C(n-1,2)} det[C(2n-2i-2j, n-2i)]_{i,j = 1..floor(n/2)}`.
pub fn invariants(n: usize) -> Result<VarietyInvariants> {
    if n < 2 {
        return Err(Error::Invalid("n must be at least 2".into()));
    }
    let n64 = n as i64;
    let h = n / 2;
    let c = |top: i64, bottom: i64| -> BigInt {
        if top < 0 || bottom < 0 || bottom > top {
            BigInt::zero()
        } else {
            BigInt::from(binomial(top as u64, bottom as u64))
        }
    };
    let m: Vec<Vec<BigInt>> = (1..=h as i64)
        .map(|i| (1..=h as i64).map(|j| c(2 * n64 - 2 * i - 2 * j, n64 - 2 * i)).collect())
        .collect();
    let det = if m.is_empty() { BigInt::one() } else { det_bigint(&m) };
    let pow = BigInt::one() << binomial(n as u64 - 1, 2) as usize;
    Ok(VarietyInvariants { n, dim: binomial(n as u64, 2) as u64, degree: pow * det })
}

/// `(1/6) J_6` in the upper-left block, identity below.
pub fn counterexample_matrix(n: usize) -> Result<DoublyStochasticMatrix<BigRational>> {
    if n < 6 {
        return Err(Error::Invalid("the counterexample needs n >= 6".into()));
    }
    let sixth = BigRational::new(1.into(), 6.into());
    let m = Mat::from_fn(n, n, |i, j| {
        if i < 6 && j < 6 {
            sixth.clone()
        } else if i == j {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    });
    DoublyStochasticMatrix::new(m)
}

fn rank_mod(gens: &[Polynomial], mults: &[Monomial], target: &HashMap<Monomial, usize>, field: PrimeField) -> Result<usize> {
    let mut m = ModMatrix::zeros(gens.len() * mults.len(), target.len(), field);
    for (gi, g) in gens.iter().enumerate() {
        let terms: Vec<(&Monomial, u64)> =
            g.terms().map(|(mo, c)| field.from_rational(c).map(|v| (mo, v))).collect::<Result<_>>()?;
        for (mi, mu) in mults.iter().enumerate() {
            let r = gi * mults.len() + mi;
            for (mo, v) in &terms {
                m.set(r, target[&mo.mul(mu)], *v);
            }
        }
    }
    Ok(m.rank())
}

/// Rank of `(q_1, ..., q_k) -> sum q_i g_i` on multipliers of degree `d`,
/// computed modulo random primes until two of them reach the same largest
/// rank.
pub fn multiplication_rank(gens: &[Polynomial], d: u32, seed: u64) -> Result<usize> {
    let Some(first) = gens.first() else { return Ok(0) };
    let e = first.homogeneous_degree().ok_or(Error::MixedDegrees)?;
    if gens.iter().any(|g| g.homogeneous_degree() != Some(e) || g.ring() != first.ring()) {
        return Err(Error::MixedDegrees);
    }
    let nv = first.ring().nvars();
    let mults = monomial_basis(nv, d);
    let target: HashMap<Monomial, usize> = monomial_basis(nv, e + d).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: Vec<u64> = Vec::new();
    let mut ranks: Vec<usize> = Vec::new();
    for _ in 0..8 {
        let p = random_primes(&mut rng, 1, &used)[0];
        used.push(p);
        let r = rank_mod(gens, &mults, &target, PrimeField::new(p))?;
        ranks.push(r);
        let best = *ranks.iter().max().unwrap();
        if ranks.iter().filter(|&&x| x == best).count() >= 2 {
            return Ok(best);
        }
    }
    Err(Error::Verification("primes did not agree on the multiplication rank".into()))
}
