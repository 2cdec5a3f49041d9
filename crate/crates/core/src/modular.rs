//! Word-size prime fields, dense elimination mod p, Chinese remaindering and
//! rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Arithmetic modulo a prime `p < 2^31` with Barrett reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    // floor(2^64 / p)
    m: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 31), "modulus must be an odd prime below 2^31");
        let m = u64::MAX / p;
        PrimeField { p, m }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces any `x < 2^63`.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.m as u128) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits")
    }

    pub fn from_rational(&self, v: &BigRational) -> Result<u64> {
        let d = self.from_bigint(v.denom());
        let inv = self.inv(d).ok_or(Error::DenominatorDivisible(self.p))?;
        Ok(self.mul(self.from_bigint(v.numer()), inv))
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn to_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random primes in `[2^30, 2^31)`, distinct and not in `avoid`.
pub fn random_primes<R: Rng>(rng: &mut R, count: usize, avoid: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(c) && !out.contains(&c) && !avoid.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug)]
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: PrimeField,
    pub data: Vec<u32>,
}

/// Row echelon data: pivot columns plus the reduced pivot rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub field: PrimeField,
    pub cols: usize,
    pub pivots: Vec<usize>,
    /// `rank x cols`, row `k` has a 1 in `pivots[k]` and zeros left of it.
    pub rows: Vec<Vec<u32>>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, field: PrimeField) -> Self {
        ModMatrix { rows, cols, field, data: vec![0; rows * cols] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c] as u64
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v as u32;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Forward elimination. Consumes the matrix.
    pub fn echelon(mut self) -> Echelon {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut top = 0usize;
        for c in 0..cols {
            if top == rows {
                break;
            }
            let Some(pr) = (top..rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if pr != top {
                for j in c..cols {
                    self.data.swap(pr * cols + j, top * cols + j);
                }
            }
            let inv = f.inv(self.data[top * cols + c] as u64).expect("nonzero pivot");
            for j in c..cols {
                let v = self.data[top * cols + j] as u64;
                self.data[top * cols + j] = f.mul(v, inv) as u32;
            }
            let (head, tail) = self.data.split_at_mut((top + 1) * cols);
            let pivot_row = &head[top * cols..];
            tail.par_chunks_mut(cols).for_each(|row| {
                let factor = row[c] as u64;
                if factor == 0 {
                    return;
                }
                let neg = f.neg(factor);
                for (x, &y) in row[c..].iter_mut().zip(pivot_row[c..].iter()) {
                    *x = f.reduce(*x as u64 + neg * y as u64) as u32;
                }
            });
            pivots.push(c);
            top += 1;
        }
        let rank = pivots.len();
        let reduced = (0..rank).map(|r| self.data[r * cols..(r + 1) * cols].to_vec()).collect();
        Echelon { field: f, cols, pivots, rows: reduced }
    }

    pub fn rank(self) -> usize {
        self.echelon().pivots.len()
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Kernel basis in reduced form: for each free column `f`, the vector with
    /// a 1 at `f`, zeros at the other free columns, and pivot entries solved
    /// by back substitution.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let rank = self.rank();
        self.free_columns()
            .par_iter()
            .map(|&free| {
                let mut v = vec![0u64; self.cols];
                v[free] = 1;
                for k in (0..rank).rev() {
                    let row = &self.rows[k];
                    let mut acc = 0u64;
                    // entries right of the pivot: other pivots (solved) and `free`
                    for j in (self.pivots[k] + 1)..self.cols {
                        let a = row[j] as u64;
                        if a != 0 && v[j] != 0 {
                            acc = f.add(acc, f.mul(a, v[j]));
                        }
                    }
                    v[self.pivots[k]] = f.neg(acc);
                }
                v
            })
            .collect()
    }
}

/// Combines residues `r_i mod m_i` into the residue modulo the product.
pub fn crt(residues: &[u64], moduli: &[u64]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, &p) in residues.iter().zip(moduli) {
        let f = PrimeField::new(p);
        let xm = f.from_bigint(&x);
        let mm = f.from_bigint(&m);
        let t = f.mul(f.sub(r, xm), f.inv(mm).expect("coprime moduli"));
        x += &m * BigInt::from(t);
        m *= BigInt::from(p);
    }
    (x, m)
}

/// Finds `a/b` with `|a|, b <= sqrt(m/2)` and `a = b * x mod m`.
pub fn rational_reconstruction(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2u8)).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (q, r2) = r0.div_rem(&r1);
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}
