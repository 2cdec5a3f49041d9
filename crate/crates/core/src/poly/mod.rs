//! Sparse multivariate polynomials with arbitrary-precision rational
//! coefficients.
//!
//! Terms are kept in graded reverse lexicographic order where the first ring
//! variable is the smallest. For the projective rings used throughout the
//! crate the variables are `y11 < y12 < ... < s`, so `s^d` is the largest
//! monomial of degree `d`.

mod eval;
mod text;

pub use eval::rational_to_f64;
pub use text::{read_poly_blocks, POLY_HEADER};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Ordered list of variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    names: Vec<String>,
}

impl Ring {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Ring> {
        Arc::new(Ring { names: names.into_iter().map(Into::into).collect() })
    }

    /// Homogeneous coordinate ring of `P^{(n-1)^2}`: `y11, ..., y(n-1)(n-1), s`.
    pub fn projective(n: usize) -> Arc<Ring> {
        let mut names = Vec::with_capacity((n - 1) * (n - 1) + 1);
        for i in 1..n {
            for j in 1..n {
                names.push(y_name(i, j, n));
            }
        }
        names.push("s".to_string());
        Ring::new(names)
    }

    /// `t1, ..., tn`, the ring of the sign product.
    pub fn sign_ring(n: usize) -> Arc<Ring> {
        Ring::new((1..=n).map(|k| format!("t{k}")))
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|v| v == name)
    }

    pub fn var(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

/// Name of the block variable in row `i`, column `j` (1-based) for matrices of size `n`.
pub fn y_name(i: usize, j: usize, n: usize) -> String {
    if n <= 10 {
        format!("y{i}{j}")
    } else {
        format!("y{i}_{j}")
    }
}

/// Exponent vector. Ordered by grevlex with variable 0 smallest.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn new(exponents: Vec<u16>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Monomial::new(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial::new(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a != b {
                // smaller exponent in the smallest differing variable wins
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// All monomials of total degree `d` in `nvars` variables, in descending order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(var: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if var + 1 == cur.len() {
            cur[var] = left as u16;
            out.push(Monomial::new(cur.clone()));
            cur[var] = 0;
            return;
        }
        for e in 0..=left {
            cur[var] = e as u16;
            rec(var + 1, left - e, cur, out);
        }
        cur[var] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    rec(0, d, &mut vec![0; nvars], &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// A polynomial over the rationals in a named ring.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Polynomial { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: BigRational) -> Self {
        let mut p = Polynomial::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.nvars()), c);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Polynomial::constant(ring, BigRational::one())
    }

    pub fn var(ring: &Arc<Ring>, var: usize) -> Self {
        let mut p = Polynomial::zero(ring);
        p.terms.insert(Monomial::var(ring.nvars(), var), BigRational::one());
        p
    }

    pub fn var_named(ring: &Arc<Ring>, name: &str) -> Result<Self> {
        Ok(Polynomial::var(ring, ring.var(name)?))
    }

    /// Builds a polynomial from terms, summing repeated monomials and dropping zeros.
    pub fn from_terms(
        ring: &Arc<Ring>,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, c) in terms {
            if m.nvars() != ring.nvars() {
                return Err(Error::DimensionMismatch { expected: ring.nvars(), got: m.nvars() });
            }
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        Ok(Polynomial::from_map(ring, acc))
    }

    fn from_map(ring: &Arc<Ring>, acc: HashMap<Monomial, BigRational>) -> Self {
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Polynomial { ring: ring.clone(), terms }
    }

    /// Linear form `sum coeffs[i] * x_i`.
    pub fn linear(ring: &Arc<Ring>, coeffs: &[BigRational]) -> Result<Self> {
        if coeffs.len() != ring.nvars() {
            return Err(Error::DimensionMismatch { expected: ring.nvars(), got: coeffs.len() });
        }
        Polynomial::from_terms(
            ring,
            coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(ring.nvars(), i), c.clone())),
        )
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Largest total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Degree when homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        if self.is_homogeneous() {
            self.total_degree()
        } else {
            None
        }
    }

    pub fn occurs(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    fn check_ring(&self, other: &Polynomial) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(&self.ring));
        }
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        Ok(Polynomial::from_map(&self.ring, acc))
    }

    fn neg_ref(&self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Image under the ring map sending `x_v` to `assignment[v]` (a polynomial
    /// in `target`) and every unassigned variable to the same-named variable of
    /// `target`.
    pub fn substitute(
        &self,
        target: &Arc<Ring>,
        assignment: &BTreeMap<usize, Polynomial>,
    ) -> Result<Polynomial> {
        self.substitute_impl(target, assignment, false)
    }

    /// Like [`Polynomial::substitute`] but `assignment[v]` is the image of
    /// `x_v^2`; every assigned variable must occur with even exponent only.
    pub fn substitute_even(
        &self,
        target: &Arc<Ring>,
        assignment: &BTreeMap<usize, Polynomial>,
    ) -> Result<Polynomial> {
        self.substitute_impl(target, assignment, true)
    }

    fn substitute_impl(
        &self,
        target: &Arc<Ring>,
        assignment: &BTreeMap<usize, Polynomial>,
        halve: bool,
    ) -> Result<Polynomial> {
        for p in assignment.values() {
            if p.ring.as_ref() != target.as_ref() {
                return Err(Error::RingMismatch);
            }
        }
        let nv = self.ring.nvars();
        // unassigned variables keep their names in the target ring
        let mut images: Vec<Option<usize>> = vec![None; nv];
        for v in 0..nv {
            if !assignment.contains_key(&v) && self.occurs(v) {
                images[v] = Some(target.var(self.ring.name(v))?);
            }
        }
        let mut powers: BTreeMap<(usize, u16), Polynomial> = BTreeMap::new();
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut mono = vec![0u16; target.nvars()];
            let mut factor = Polynomial::constant(target, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if let Some(p) = assignment.get(&v) {
                    let e = if halve {
                        if e % 2 != 0 {
                            return Err(Error::Invalid(format!(
                                "odd exponent of `{}` in even substitution",
                                self.ring.name(v)
                            )));
                        }
                        e / 2
                    } else {
                        e
                    };
                    let pw = powers.entry((v, e)).or_insert_with(|| p.pow(e as u32));
                    factor = &factor * pw;
                } else if let Some(t) = images[v] {
                    mono[t] += e;
                }
            }
            let shift = Monomial::new(mono);
            for (m, c) in factor.terms {
                *acc.entry(m.mul(&shift)).or_insert_with(BigRational::zero) += c;
            }
        }
        Ok(Polynomial::from_map(target, acc))
    }

    /// Multiply every term by the power of `hvar` that lifts it to the top degree.
    pub fn homogenize(&self, hvar: usize) -> Result<Polynomial> {
        if self.occurs(hvar) {
            return Err(Error::VariableOccurs(self.ring.name(hvar).to_string()));
        }
        let top = match self.total_degree() {
            None => return Ok(self.clone()),
            Some(d) => d,
        };
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.to_vec();
                e[hvar] = (top - m.degree()) as u16;
                (Monomial::new(e), c.clone())
            })
            .collect();
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    /// Sets `var = 1`.
    pub fn dehomogenize(&self, var: usize) -> Polynomial {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut e = m.0.to_vec();
            e[var] = 0;
            *acc.entry(Monomial::new(e)).or_insert_with(BigRational::zero) += c;
        }
        Polynomial::from_map(&self.ring, acc)
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[var] > 0)
            .map(|(m, c)| {
                let mut e = m.0.to_vec();
                let k = e[var];
                e[var] -= 1;
                (Monomial::new(e), c * BigRational::from_integer(BigInt::from(k)))
            })
            .collect();
        Polynomial { ring: self.ring.clone(), terms }
    }

    /// Moves the polynomial into `target` by variable name.
    pub fn rename_into(&self, target: &Arc<Ring>, names: &[(&str, &str)]) -> Result<Polynomial> {
        let mut map = vec![None; self.ring.nvars()];
        for v in 0..self.ring.nvars() {
            if !self.occurs(v) {
                continue;
            }
            let src = self.ring.name(v);
            let dst = names.iter().find(|(a, _)| *a == src).map(|(_, b)| *b).unwrap_or(src);
            map[v] = Some(target.var(dst)?);
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u16; target.nvars()];
            for (v, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[v].expect("occurring variable is mapped")] += k;
                }
            }
            (Monomial::new(e), c.clone())
        });
        Polynomial::from_terms(target, terms)
    }

    /// Coprime integer coefficients with a positive leading coefficient.
    pub fn normalized(&self) -> Polynomial {
        let Some((_, lead)) = self.leading_term() else {
            return self.clone();
        };
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let v = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&v);
        }
        let mut factor = BigRational::new(den_lcm, num_gcd);
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn is_normalized(&self) -> bool {
        let Some((_, lead)) = self.leading_term() else {
            return true;
        };
        if !lead.is_positive() || self.terms.values().any(|c| !c.is_integer()) {
            return false;
        }
        let g = self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c.numer()));
        g.is_one()
    }

    /// Integer coefficients, in descending monomial order.
    pub fn integer_coefficients(&self) -> Result<Vec<(Monomial, BigInt)>> {
        self.terms()
            .map(|(m, c)| {
                if c.is_integer() {
                    Ok((m.clone(), c.numer().clone()))
                } else {
                    Err(Error::NotIntegral)
                }
            })
            .collect()
    }

    /// Coefficient vector over an explicit monomial basis.
    pub fn coefficient_vector(&self, basis: &[Monomial]) -> Result<Vec<BigRational>> {
        let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut out = vec![BigRational::zero(); basis.len()];
        for (m, c) in &self.terms {
            let i = *index
                .get(m)
                .ok_or_else(|| Error::Invalid(format!("monomial {m:?} outside the basis")))?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    pub fn from_coefficient_vector(
        ring: &Arc<Ring>,
        basis: &[Monomial],
        coeffs: &[BigRational],
    ) -> Result<Polynomial> {
        if basis.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Polynomial::from_terms(ring, basis.iter().cloned().zip(coeffs.iter().cloned()))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.name(v).to_string()),
                    _ => factors.push(format!("{}^{}", self.ring.name(v), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_add(rhs).expect("ring mismatch in +")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("ring mismatch in -")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("ring mismatch in *")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.neg_ref()
    }
}

/// Shorthand for an integer rational.
pub fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Sum of polynomials in one ring.
pub fn sum<'a>(ring: &Arc<Ring>, items: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
    let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
    for p in items {
        for (m, c) in &p.terms {
            *acc.entry(m.clone()).or_insert_with(BigRational::zero) += c;
        }
    }
    Polynomial::from_map(ring, acc)
}
