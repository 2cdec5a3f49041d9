//! Linear components of the variety cut out by the six quintics.
//!
//! Three families, all for `n = 4` and written in terms of the symbolic
//! completion `V` (1-based):
//!
//! * entry-one: `V(i,j) = s` and the rest of row `i` and column `j` vanish
//!   (16 components of dimension 4);
//! * circulant blocks: for `a, a'` in `{2,3,4}` with `{b,c}` and `{b',c'}`
//!   the remaining indices in increasing order,
//!   `V11 = V(a,a')`, `V(a,1) = V(1,a')`, `V(b,1) = V(c,a')`,
//!   `V(1,b') = V(a,c')` (9 components of dimension 5);
//! * at infinity: `s = 0` together with `y(k,c1) + y(k,c2) = 0` for `k = 1..3`,
//!   or the same with rows (6 components of dimension 5).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::rank_rational;
use crate::ortho::symbolic_completion;
use crate::poly::{Monomial, Polynomial, Ring};

const NVARS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComponentShape {
    EntryOne { i: usize, j: usize },
    CirculantBlocks { a: usize, a_prime: usize },
    /// `columns = true`: pairs of columns within each of the first three rows.
    Infinity { columns: bool, first: usize, second: usize },
}

#[derive(Clone, Debug)]
pub struct ComponentDescription {
    pub id: String,
    pub dimension: usize,
    /// Reduced row echelon basis of the linear ideal, scaled to primitive
    /// integer forms.
    pub generators: Vec<Polynomial>,
    pub at_infinity: bool,
    pub shape: ComponentShape,
}

fn ring() -> std::sync::Arc<Ring> {
    Ring::projective(4)
}

fn linear_coefficients(f: &Polynomial) -> Result<Vec<BigRational>> {
    if f.homogeneous_degree().is_some_and(|d| d != 1) {
        return Err(Error::Invalid("expected a linear form".into()));
    }
    Ok((0..NVARS).map(|v| f.coefficient(&Monomial::var(NVARS, v))).collect())
}

/// Reduced row echelon form, zero rows dropped.
fn rref(rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let mut a = rows;
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&k| !a[k][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for k in 0..a.len() {
            if k != r && !a[k][c].is_zero() {
                let f = a[k][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[k][j] -= t;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

fn primitive_form(row: &[BigRational]) -> Polynomial {
    let lcm = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let coeffs: Vec<BigRational> = row.iter().map(|q| q * BigRational::from_integer(lcm.clone())).collect();
    Polynomial::linear(&ring(), &coeffs).expect("ten coefficients").normalized()
}

/// Canonical basis of the span of linear forms.
pub fn canonical_linear_basis(forms: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let rows = forms.iter().map(linear_coefficients).collect::<Result<Vec<_>>>()?;
    Ok(rref(rows).iter().map(|r| primitive_form(r)).collect())
}

/// Whether two sets of linear forms span the same space.
pub fn same_linear_span(a: &[Polynomial], b: &[Polynomial]) -> Result<bool> {
    let ra = rref(a.iter().map(linear_coefficients).collect::<Result<Vec<_>>>()?);
    let rb = rref(b.iter().map(linear_coefficients).collect::<Result<Vec<_>>>()?);
    Ok(ra == rb)
}

impl ComponentDescription {
    fn from_forms(id: String, forms: Vec<Polynomial>, shape: ComponentShape) -> Self {
        let generators = canonical_linear_basis(&forms).expect("structured forms are linear");
        let at_infinity = matches!(shape, ComponentShape::Infinity { .. });
        ComponentDescription { id, dimension: NVARS - 1 - generators.len(), generators, at_infinity, shape }
    }

    pub fn entry_one(i: usize, j: usize) -> Self {
        let v = symbolic_completion(4);
        let s = Polynomial::var(&ring(), NVARS - 1);
        let mut forms = vec![&v[i - 1][j - 1] - &s];
        forms.extend((1..=4).filter(|&c| c != j).map(|c| v[i - 1][c - 1].clone()));
        forms.extend((1..=4).filter(|&r| r != i).map(|r| v[r - 1][j - 1].clone()));
        Self::from_forms(format!("E{i}{j}"), forms, ComponentShape::EntryOne { i, j })
    }

    pub fn circulant(a: usize, a_prime: usize) -> Self {
        let v = symbolic_completion(4);
        let at = |i: usize, j: usize| v[i - 1][j - 1].clone();
        let rest = |x: usize| -> (usize, usize) {
            let r: Vec<usize> = (2..=4).filter(|&k| k != x).collect();
            (r[0], r[1])
        };
        let (b, c) = rest(a);
        let (bp, cp) = rest(a_prime);
        let forms = vec![
            &at(1, 1) - &at(a, a_prime),
            &at(a, 1) - &at(1, a_prime),
            &at(b, 1) - &at(c, a_prime),
            &at(1, bp) - &at(a, cp),
        ];
        Self::from_forms(format!("C{a}{a_prime}"), forms, ComponentShape::CirculantBlocks { a, a_prime })
    }

    pub fn infinity(columns: bool, first: usize, second: usize) -> Self {
        let r = ring();
        let y = |i: usize, j: usize| Polynomial::var(&r, (i - 1) * 3 + (j - 1));
        let mut forms = vec![Polynomial::var(&r, NVARS - 1)];
        for k in 1..=3 {
            forms.push(if columns { &y(k, first) + &y(k, second) } else { &y(first, k) + &y(second, k) });
        }
        let tag = if columns { 'c' } else { 'r' };
        Self::from_forms(format!("I{tag}{first}{second}"), forms, ComponentShape::Infinity { columns, first, second })
    }

    /// Whether the component is not contained in the hyperplane `s = 0`.
    pub fn is_s_relevant(&self) -> bool {
        let s = Polynomial::var(&ring(), NVARS - 1);
        let mut forms = self.generators.clone();
        forms.push(s);
        canonical_linear_basis(&forms).map(|b| b.len() > self.generators.len()).unwrap_or(false)
    }

    /// Basis of the linear subspace of `Q^10` the generators cut out.
    pub fn span_basis(&self) -> Vec<Vec<BigRational>> {
        let rows = rref(self.generators.iter().map(|g| linear_coefficients(g).unwrap()).collect());
        let pivots: Vec<usize> = rows.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect();
        (0..NVARS)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut w = vec![BigRational::zero(); NVARS];
                w[free] = BigRational::one();
                for (r, &p) in rows.iter().zip(&pivots) {
                    w[p] = -r[free].clone();
                }
                w
            })
            .collect()
    }
}

/// 16 entry-one components, 9 circulant-block components, 6 at infinity.
pub fn component_catalog() -> Vec<ComponentDescription> {
    let mut out = Vec::with_capacity(31);
    for i in 1..=4 {
        for j in 1..=4 {
            out.push(ComponentDescription::entry_one(i, j));
        }
    }
    for a in 2..=4 {
        for ap in 2..=4 {
            out.push(ComponentDescription::circulant(a, ap));
        }
    }
    for columns in [true, false] {
        for (f, s) in [(1, 2), (1, 3), (2, 3)] {
            out.push(ComponentDescription::infinity(columns, f, s));
        }
    }
    out
}

/// Parses an ideal written as `(y_0, -y_2-y_5+y_9, ...)` with `y_0..y_8` the
/// block variables in row-major order and `y_9 = s`.
pub fn parse_indexed_ideal(text: &str) -> Result<Vec<Polynomial>> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    inner
        .split(',')
        .map(|g| {
            let mut coeffs = vec![BigRational::zero(); NVARS];
            let g: String = g.chars().filter(|c| !c.is_whitespace()).collect();
            let mut sign = 1i64;
            let mut rest = g.as_str();
            while !rest.is_empty() {
                if let Some(r) = rest.strip_prefix('+') {
                    sign = 1;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('-') {
                    sign = -1;
                    rest = r;
                }
                let r = rest.strip_prefix("y_").ok_or_else(|| Error::Invalid(format!("bad generator `{g}`")))?;
                let end = r.find(['+', '-']).unwrap_or(r.len());
                let k: usize = r[..end].parse().map_err(|_| Error::Invalid(format!("bad index in `{g}`")))?;
                if k >= NVARS {
                    return Err(Error::IndexOutOfRange(format!("y_{k}")));
                }
                coeffs[k] += BigRational::from_integer(sign.into());
                rest = &r[end..];
                sign = 1;
            }
            Polynomial::linear(&ring(), &coeffs)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub id: String,
    pub dimension: usize,
    /// Indices of the quintics that do not vanish on the component.
    pub containment_failures: Vec<usize>,
    pub jacobian_rank: usize,
    pub tangent_dimension: usize,
}

impl ComponentReport {
    pub fn confirmed(&self) -> bool {
        self.containment_failures.is_empty() && self.tangent_dimension == self.dimension
    }
}

/// Images of the ten coordinates under the parametrization of the span by
/// `t1, ..., tk`.
fn span_parametrization(c: &ComponentDescription) -> (std::sync::Arc<Ring>, BTreeMap<usize, Polynomial>) {
    let w = c.span_basis();
    let tring = Ring::new((1..=w.len()).map(|k| format!("t{k}")));
    let images = (0..NVARS)
        .map(|v| {
            let coeffs: Vec<BigRational> = w.iter().map(|b| b[v].clone()).collect();
            (v, Polynomial::linear(&tring, &coeffs).unwrap())
        })
        .collect();
    (tring, images)
}

/// Containment and tangent-space check. The Jacobian is evaluated exactly at
/// a point with random integer coordinates in the span basis.
pub fn verify_component(c: &ComponentDescription, quintics: &[Polynomial], seed: u64) -> Result<ComponentReport> {
    let (tring, images) = span_parametrization(c);
    let results: Vec<Result<bool>> =
        quintics.par_iter().map(|q| q.substitute(&tring, &images).map(|r| r.is_zero())).collect();
    let mut containment_failures = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        if !r? {
            containment_failures.push(k);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = c.span_basis();
    let tvals: Vec<BigRational> = w.iter().map(|_| BigRational::from_integer(rng.gen_range(-1000i64..=1000).into())).collect();
    let point: Vec<BigRational> =
        (0..NVARS).map(|v| w.iter().zip(&tvals).fold(BigRational::zero(), |acc, (b, t)| acc + &b[v] * t)).collect();
    let jac: Vec<Vec<BigRational>> = quintics
        .par_iter()
        .map(|q| (0..NVARS).map(|v| q.derivative(v).eval_rational(&point)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let jacobian_rank = rank_rational(&jac);
    Ok(ComponentReport {
        id: c.id.clone(),
        dimension: c.dimension,
        containment_failures,
        jacobian_rank,
        tangent_dimension: NVARS - 1 - jacobian_rank,
    })
}

/// Component with random integer generators, for negative checks.
pub fn random_linear_component(dimension: usize, seed: u64) -> Result<ComponentDescription> {
    if dimension >= NVARS - 1 {
        return Err(Error::Invalid("dimension must be below 9".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let forms: Vec<Polynomial> = (0..NVARS - 1 - dimension)
            .map(|_| {
                let coeffs: Vec<BigRational> =
                    (0..NVARS).map(|_| BigRational::from_integer(rng.gen_range(-9i64..=9).into())).collect();
                Polynomial::linear(&ring(), &coeffs).unwrap()
            })
            .collect();
        let generators = canonical_linear_basis(&forms)?;
        if generators.len() == forms.len() {
            return Ok(ComponentDescription {
                id: format!("random-{seed}"),
                dimension,
                generators,
                at_infinity: false,
                shape: ComponentShape::Infinity { columns: false, first: 0, second: 0 },
            });
        }
    }
}

/// Evaluates a linear form, used to check sampled points against a component.
pub fn linear_value(f: &Polynomial, point: &[BigRational]) -> Result<BigRational> {
    let c = linear_coefficients(f)?;
    Ok(c.iter().zip(point).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
}
