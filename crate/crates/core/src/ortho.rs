//! Orthogonal matrices from the Cayley transform, the entrywise squaring map,
//! and conversion between doubly stochastic matrices and points of
//! `P^{(n-1)^2}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Ring};

/// Entrywise tolerance for orthogonality and stochasticity in float mode.
pub const FLOAT_TOL: f64 = 1e-12;

/// Field elements the matrix code runs over: exact rationals or `f64`.
pub trait Scalar:
    Clone + Num + Signed + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const EXACT: bool;

    fn from_frac(num: i64, den: i64) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exactly zero, or within `tol` in float mode.
    fn near_zero(&self, tol: f64) -> bool;
    /// Skew-symmetric matrix entry for Cayley sampling.
    fn random_skew_entry<R: Rng>(rng: &mut R, bounds: &SkewBounds) -> Self;
    fn parse_entry(s: &str) -> Result<Self>;
    fn format_entry(&self) -> String;
}

/// Ranges for rational skew entries `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewBounds {
    pub max_num: i64,
    pub max_den: i64,
}

impl Default for SkewBounds {
    fn default() -> Self {
        SkewBounds { max_num: 50, max_den: 20 }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_frac(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn random_skew_entry<R: Rng>(rng: &mut R, bounds: &SkewBounds) -> Self {
        let num = rng.gen_range(-bounds.max_num..=bounds.max_num);
        let den = rng.gen_range(1..=bounds.max_den);
        Self::from_frac(num, den)
    }

    fn parse_entry(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn format_entry(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_frac(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(q: &BigRational) -> Self {
        crate::poly::rational_to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near_zero(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn random_skew_entry<R: Rng>(rng: &mut R, _bounds: &SkewBounds) -> Self {
        rng.gen_range(-1.0..1.0)
    }

    fn parse_entry(s: &str) -> Result<Self> {
        if s.contains('/') {
            return parse_rational(s).map(|q| Scalar::to_f64(&q));
        }
        f64::from_str(s).map_err(|_| Error::Invalid(format!("bad number `{s}`")))
    }

    fn format_entry(&self) -> String {
        format!("{self:?}")
    }
}

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("bad rational `{s}`"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
        let den = num_traits::pow(BigInt::from(10u8), frac.len());
        let q = BigRational::new(num, den);
        return Ok(if neg { -q } else { q });
    }
    let a: BigInt = s.trim().parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(a))
}

/// Small dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Invalid("ragged matrix".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Mat<T>) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn add(&self, other: &Mat<T>) -> Self {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Mat<T>) -> Self {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(row_perm[i], col_perm[j])].clone())
    }

    /// Gauss-Jordan inverse with largest-magnitude pivoting.
    pub fn inverse(&self) -> Result<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Mat<T> = Mat::identity(n);
        for c in 0..n {
            let mut best = c;
            for r in c + 1..n {
                if a[(r, c)].abs() > a[(best, c)].abs() {
                    best = r;
                }
            }
            if a[(best, c)].is_zero() || (!T::EXACT && a[(best, c)].to_f64().abs() < 1e-300) {
                return Err(Error::Singular);
            }
            if best != c {
                for j in 0..n {
                    a.data.swap(best * n + j, c * n + j);
                    inv.data.swap(best * n + j, c * n + j);
                }
            }
            let p = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() / p.clone();
                inv[(c, j)] = inv[(c, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(c, j)].clone();
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let mut best = c;
            for r in c + 1..n {
                if a[(r, c)].abs() > a[(best, c)].abs() {
                    best = r;
                }
            }
            if a[(best, c)].is_zero() {
                return T::zero();
            }
            if best != c {
                for j in 0..n {
                    a.data.swap(best * n + j, c * n + j);
                }
                det = -det;
            }
            let p = a[(c, c)].clone();
            det = det * p.clone();
            for r in c + 1..n {
                let f = a[(r, c)].clone() / p.clone();
                for j in c..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                }
            }
        }
        det
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_skew_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| (self[(i, j)].clone() + self[(j, i)].clone()).near_zero(tol))
            })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(T::parse_entry).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?;
        Mat::from_rows(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(T::format_entry).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// An orthogonal matrix, exact or within [`FLOAT_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix<T> {
    mat: Mat<T>,
}

impl<T: Scalar> OrthogonalMatrix<T> {
    pub fn new(mat: Mat<T>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Invalid("orthogonal matrix must be square".into()));
        }
        let defect = mat.mul(&mat.transpose()).sub(&Mat::identity(mat.rows()));
        if !defect.data.iter().all(|x| x.near_zero(FLOAT_TOL)) {
            return Err(Error::Invalid("matrix is not orthogonal".into()));
        }
        Ok(OrthogonalMatrix { mat })
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat<T> {
        self.mat
    }

    pub fn det(&self) -> T {
        self.mat.det()
    }

    /// `diag(row_signs) * V * diag(col_signs)`, still orthogonal.
    pub fn with_signs(&self, row_signs: &[i8], col_signs: &[i8]) -> Self {
        let m = Mat::from_fn(self.n(), self.n(), |i, j| {
            let v = self.mat[(i, j)].clone();
            if row_signs[i] * col_signs[j] < 0 {
                -v
            } else {
                v
            }
        });
        OrthogonalMatrix { mat: m }
    }
}

/// Nonnegative matrix with unit row and column sums.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublyStochasticMatrix<T> {
    mat: Mat<T>,
}

impl<T: Scalar> DoublyStochasticMatrix<T> {
    pub fn new(mat: Mat<T>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Invalid("doubly stochastic matrix must be square".into()));
        }
        let n = mat.rows();
        for i in 0..n {
            let row: T = (0..n).fold(T::zero(), |a, j| a + mat[(i, j)].clone());
            let col: T = (0..n).fold(T::zero(), |a, j| a + mat[(j, i)].clone());
            if !(row - T::one()).near_zero(FLOAT_TOL) || !(col - T::one()).near_zero(FLOAT_TOL) {
                return Err(Error::Invalid(format!("row or column {} does not sum to 1", i + 1)));
            }
        }
        let floor = if T::EXACT { 0.0 } else { -FLOAT_TOL };
        if mat.data.iter().any(|x| x.to_f64() < floor || (T::EXACT && x.is_negative())) {
            return Err(Error::Invalid("negative entry".into()));
        }
        Ok(DoublyStochasticMatrix { mat })
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn transpose(&self) -> Self {
        DoublyStochasticMatrix { mat: self.mat.transpose() }
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        DoublyStochasticMatrix { mat: self.mat.permute(row_perm, col_perm) }
    }

    /// Upper-left block with `s = 1`.
    pub fn project(&self) -> ProjectivePoint<T> {
        let n = self.n();
        let mut coords = Vec::with_capacity((n - 1) * (n - 1) + 1);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                coords.push(self.mat[(i, j)].clone());
            }
        }
        coords.push(T::one());
        ProjectivePoint { n, coords }
    }

    /// `(1/n) J_n`.
    pub fn uniform(n: usize) -> Self {
        DoublyStochasticMatrix { mat: Mat::from_fn(n, n, |_, _| T::from_frac(1, n as i64)) }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.n(), other.n());
        let mat = Mat::from_fn(a + b, a + b, |i, j| match (i < a, j < a) {
            (true, true) => self.mat[(i, j)].clone(),
            (false, false) => other.mat[(i - a, j - a)].clone(),
            _ => T::zero(),
        });
        DoublyStochasticMatrix { mat }
    }
}

/// Point of `P^{(n-1)^2}` in coordinates `(y11, ..., y(n-1)(n-1), s)`.
#[derive(Clone, Debug)]
pub struct ProjectivePoint<T> {
    n: usize,
    coords: Vec<T>,
}

impl<T: Scalar> ProjectivePoint<T> {
    pub fn new(n: usize, coords: Vec<T>) -> Result<Self> {
        let expected = (n - 1) * (n - 1) + 1;
        if coords.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: coords.len() });
        }
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::Invalid("all coordinates are zero".into()));
        }
        Ok(ProjectivePoint { n, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn s(&self) -> &T {
        self.coords.last().expect("nonempty")
    }

    /// Block entry `y_(i,j)`, 1-based.
    pub fn y(&self, i: usize, j: usize) -> &T {
        &self.coords[(i - 1) * (self.n - 1) + (j - 1)]
    }

    /// Equality up to one global nonzero scalar.
    pub fn same_point(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        if T::EXACT {
            let k = (0..self.coords.len()).find(|&i| !self.coords[i].is_zero()).expect("nonzero");
            (0..self.coords.len()).all(|i| {
                (self.coords[i].clone() * other.coords[k].clone() - other.coords[i].clone() * self.coords[k].clone())
                    .is_zero()
            })
        } else {
            let norm = |c: &[T]| c.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
            let (na, nb) = (norm(&self.coords), norm(&other.coords));
            let k = (0..self.coords.len())
                .max_by(|&a, &b| self.coords[a].to_f64().abs().total_cmp(&self.coords[b].to_f64().abs()))
                .expect("nonempty");
            let ratio = other.coords[k].to_f64() / self.coords[k].to_f64();
            ratio != 0.0
                && (0..self.coords.len()).all(|i| {
                    (self.coords[i].to_f64() * ratio - other.coords[i].to_f64()).abs() <= 1e-9 * na.max(nb / ratio.abs()) * ratio.abs()
                })
        }
    }

    /// The point's transpose: `y_(i,j) <-> y_(j,i)`.
    pub fn transpose(&self) -> Self {
        let m = self.n - 1;
        let mut coords = self.coords.clone();
        for i in 0..m {
            for j in 0..m {
                coords[i * m + j] = self.coords[j * m + i].clone();
            }
        }
        ProjectivePoint { n: self.n, coords }
    }

    pub fn to_f64(&self) -> ProjectivePoint<f64> {
        ProjectivePoint { n: self.n, coords: self.coords.iter().map(Scalar::to_f64).collect() }
    }

    pub fn to_text(&self) -> String {
        let v: Vec<String> = self.coords.iter().map(T::format_entry).collect();
        v.join(" ")
    }

    pub fn parse(n: usize, line: &str) -> Result<Self> {
        let coords = line.split_whitespace().map(T::parse_entry).collect::<Result<Vec<T>>>()?;
        ProjectivePoint::new(n, coords)
    }
}

impl ProjectivePoint<BigRational> {
    /// Primitive integer representative of the point.
    pub fn integer_coords(&self) -> Vec<BigInt> {
        let lcm = self.coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coords.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        ints.into_iter().map(|v| v / &g).collect()
    }
}

/// `(I - B)(I + B)^{-1}` for skew-symmetric `B`.
pub fn cayley<T: Scalar>(b: &Mat<T>) -> Result<OrthogonalMatrix<T>> {
    if !b.is_skew_symmetric(FLOAT_TOL) {
        return Err(Error::Invalid("Cayley input must be skew-symmetric".into()));
    }
    let n = b.rows();
    let id = Mat::identity(n);
    let inv = id.add(b).inverse()?;
    OrthogonalMatrix::new(id.sub(b).mul(&inv))
}

pub fn random_skew<T: Scalar, R: Rng>(n: usize, rng: &mut R, bounds: &SkewBounds) -> Mat<T> {
    let mut b = Mat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = T::random_skew_entry(rng, bounds);
            b[(i, j)] = v.clone();
            b[(j, i)] = -v;
        }
    }
    b
}

/// Random orthogonal matrix from the Cayley parameterization, resampling on
/// singular `I + B`.
pub fn random_orthogonal<T: Scalar, R: Rng>(n: usize, rng: &mut R, bounds: &SkewBounds) -> OrthogonalMatrix<T> {
    loop {
        let b = random_skew::<T, R>(n, rng, bounds);
        if let Ok(v) = cayley(&b) {
            return v;
        }
    }
}

/// `y_(i,j) = v_ij^2` for `i, j < n`, `s = 1`.
pub fn squaring_project<T: Scalar>(v: &OrthogonalMatrix<T>) -> ProjectivePoint<T> {
    let n = v.n();
    let mut coords = Vec::with_capacity((n - 1) * (n - 1) + 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let x = v.mat[(i, j)].clone();
            coords.push(x.clone() * x);
        }
    }
    coords.push(T::one());
    ProjectivePoint { n, coords }
}

/// Deterministic stream of sample points on `Z_n`.
pub struct PointSampler {
    n: usize,
    rng: ChaCha8Rng,
    bounds: SkewBounds,
}

impl PointSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        PointSampler { n, rng: ChaCha8Rng::seed_from_u64(seed), bounds: SkewBounds::default() }
    }

    pub fn with_bounds(mut self, bounds: SkewBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn orthogonal<T: Scalar>(&mut self) -> OrthogonalMatrix<T> {
        random_orthogonal(self.n, &mut self.rng, &self.bounds)
    }

    pub fn point<T: Scalar>(&mut self) -> ProjectivePoint<T> {
        squaring_project(&self.orthogonal::<T>())
    }

    pub fn points<T: Scalar>(&mut self, count: usize) -> Vec<ProjectivePoint<T>> {
        (0..count).map(|_| self.point()).collect()
    }
}

/// One sample point determined entirely by `seed`.
pub fn sample_point<T: Scalar>(n: usize, seed: u64) -> ProjectivePoint<T> {
    PointSampler::new(n, seed).point()
}

/// Dehomogenizes and completes the last row and column from the unit row and
/// column sums. The flag reports whether every entry is nonnegative.
pub fn embed_full<T: Scalar>(p: &ProjectivePoint<T>) -> Result<(Mat<T>, bool)> {
    if p.s().is_zero() {
        return Err(Error::PointAtInfinity);
    }
    let n = p.n;
    let m = n - 1;
    let s = p.s().clone();
    let mut a = Mat::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = p.coords[i * m + j].clone() / s.clone();
        }
    }
    for i in 0..m {
        let row = (0..m).fold(T::zero(), |acc, j| acc + a[(i, j)].clone());
        a[(i, m)] = T::one() - row;
    }
    for j in 0..n {
        let col = (0..m).fold(T::zero(), |acc, i| acc + a[(i, j)].clone());
        a[(m, j)] = T::one() - col;
    }
    let floor = if T::EXACT { 0.0 } else { -FLOAT_TOL };
    let nonneg = a.data.iter().all(|x| if T::EXACT { !x.is_negative() } else { x.to_f64() >= floor });
    Ok((a, nonneg))
}

/// The generic `s`-homogenized doubly stochastic matrix: block variables in
/// the upper-left corner, last column and row completed so every row and
/// column sums to `s`.
pub fn symbolic_completion(n: usize) -> Vec<Vec<Polynomial>> {
    let ring = Ring::projective(n);
    let m = n - 1;
    let s = Polynomial::var(&ring, m * m);
    let mut v: Vec<Vec<Polynomial>> = vec![vec![Polynomial::zero(&ring); n]; n];
    for i in 0..m {
        for j in 0..m {
            v[i][j] = Polynomial::var(&ring, i * m + j);
        }
        let row_sum = crate::poly::sum(&ring, v[i][..m].iter());
        v[i][m] = &s - &row_sum;
    }
    for j in 0..n {
        let col_sum = crate::poly::sum(&ring, (0..m).map(|i| &v[i][j]));
        v[m][j] = &s - &col_sum;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::from_frac(a, b)
    }

    #[test]
    fn cayley_of_zero_is_identity() {
        let v = cayley(&Mat::<BigRational>::zeros(4, 4)).unwrap();
        assert_eq!(v.matrix(), &Mat::identity(4));
    }

    #[test]
    fn cayley_two_by_two() {
        // ((1-b^2)/(1+b^2), -2b/(1+b^2); 2b/(1+b^2), (1-b^2)/(1+b^2)) at b = 1
        let b = Mat::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(-1, 1), q(0, 1)]]).unwrap();
        let v = cayley(&b).unwrap();
        let expected = Mat::from_rows(vec![vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(0, 1)]]).unwrap();
        assert_eq!(v.matrix(), &expected);
        let b = Mat::from_rows(vec![vec![q(0, 1), q(1, 2)], vec![q(-1, 2), q(0, 1)]]).unwrap();
        let v = cayley(&b).unwrap();
        assert_eq!(v.matrix()[(0, 0)], q(3, 5));
        assert_eq!(v.matrix()[(0, 1)], q(-4, 5));
    }

    #[test]
    fn cayley_rejects_non_skew() {
        let b = Mat::from_rows(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1)]]).unwrap();
        assert!(cayley(&b).is_err());
        let b = Mat::from_rows(vec![vec![0.0, 2.0], vec![-2.0, 0.0]]).unwrap();
        assert!(cayley(&b).is_ok());
    }

    #[test]
    fn exact_cayley_is_special_orthogonal() {
        let mut sampler = PointSampler::new(4, 11);
        for _ in 0..10 {
            let v = sampler.orthogonal::<BigRational>();
            assert_eq!(v.matrix().mul(&v.matrix().transpose()), Mat::identity(4));
            assert_eq!(v.det(), BigRational::one());
        }
        let v = sampler.orthogonal::<f64>();
        assert!((v.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_and_hadamard_points() {
        let id = OrthogonalMatrix::new(Mat::<BigRational>::identity(4)).unwrap();
        let p = squaring_project(&id);
        let expected: Vec<BigRational> = [1, 0, 0, 0, 1, 0, 0, 0, 1, 1].iter().map(|&v| q(v, 1)).collect();
        assert_eq!(p.coords(), &expected[..]);
        let signs = [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]];
        let h = Mat::from_fn(4, 4, |i, j| q(signs[i][j], 2));
        let p = squaring_project(&OrthogonalMatrix::new(h).unwrap());
        assert!(p.coords()[..9].iter().all(|c| *c == q(1, 4)));
        assert_eq!(p.s(), &q(1, 1));
    }

    #[test]
    fn squaring_ignores_signs() {
        let mut sampler = PointSampler::new(4, 3);
        let v = sampler.orthogonal::<BigRational>();
        let flipped = v.with_signs(&[1, -1, 1, -1], &[-1, 1, 1, -1]);
        assert!(squaring_project(&v).same_point(&squaring_project(&flipped)));
    }

    #[test]
    fn samples_embed_as_doubly_stochastic() {
        let mut sampler = PointSampler::new(4, 5);
        for p in sampler.points::<BigRational>(20) {
            let (a, ok) = embed_full(&p).unwrap();
            assert!(ok);
            assert!(DoublyStochasticMatrix::new(a).is_ok());
        }
        for p in PointSampler::new(5, 6).points::<f64>(20) {
            let (a, ok) = embed_full(&p).unwrap();
            assert!(ok);
            assert!(DoublyStochasticMatrix::new(a).is_ok());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: ProjectivePoint<BigRational> = sample_point(4, 42);
        let b: ProjectivePoint<BigRational> = sample_point(4, 42);
        assert_eq!(a.coords(), b.coords());
        let c: ProjectivePoint<BigRational> = sample_point(4, 43);
        assert!(!a.same_point(&c));
    }

    #[test]
    fn completion_examples() {
        let block = |v: [i64; 9]| {
            let mut c: Vec<BigRational> = v.iter().map(|&x| q(x, 4)).collect();
            c.push(q(1, 1));
            ProjectivePoint::new(4, c).unwrap()
        };
        let (a, ok) = embed_full(&block([4, 0, 0, 0, 4, 0, 0, 0, 4])).unwrap();
        assert!(ok);
        assert_eq!(a, Mat::identity(4));
        let (a, ok) = embed_full(&block([1; 9])).unwrap();
        assert!(ok);
        assert!((0..4).all(|i| (0..4).all(|j| a[(i, j)] == q(1, 4))));
        let (a, ok) = embed_full(&block([0; 9])).unwrap();
        assert!(!ok);
        assert_eq!(a[(3, 3)], q(-2, 1));
        let mut at_inf: Vec<BigRational> = vec![q(1, 1); 9];
        at_inf.push(q(0, 1));
        let p = ProjectivePoint::new(4, at_inf).unwrap();
        assert!(matches!(embed_full(&p), Err(Error::PointAtInfinity)));
    }

    #[test]
    fn projective_equality_up_to_scalar() {
        let a = ProjectivePoint::new(2, vec![q(1, 2), q(1, 1)]).unwrap();
        let b = ProjectivePoint::new(2, vec![q(-3, 1), q(-6, 1)]).unwrap();
        assert!(a.same_point(&b));
        assert_eq!(b.integer_coords(), vec![BigInt::from(-1), BigInt::from(-2)]);
        let c = ProjectivePoint::new(2, vec![q(1, 1), q(1, 1)]).unwrap();
        assert!(!a.same_point(&c));
        assert!(ProjectivePoint::new(2, vec![q(0, 1), q(0, 1)]).is_err());
        let af = ProjectivePoint::new(2, vec![0.5, 1.0]).unwrap();
        let bf = ProjectivePoint::new(2, vec![-3.0, -6.0]).unwrap();
        assert!(af.same_point(&bf));
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = Mat::from_rows(vec![vec![q(1, 6), q(5, 6)], vec![q(5, 6), q(1, 6)]]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "1/6 5/6\n5/6 1/6\n");
        assert_eq!(Mat::<BigRational>::parse(&text).unwrap(), m);
        assert_eq!(Mat::<BigRational>::parse("0.25 0.75\n0.75 0.25").unwrap()[(0, 0)], q(1, 4));
        let f = Mat::<f64>::parse("0.1 1/3").unwrap();
        assert_eq!(Mat::<f64>::parse(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn symbolic_completion_sums() {
        let v = symbolic_completion(4);
        let ring = Ring::projective(4);
        let s = Polynomial::var(&ring, 9);
        for i in 0..4 {
            assert_eq!(crate::poly::sum(&ring, v[i].iter()), s);
            assert_eq!(crate::poly::sum(&ring, (0..4).map(|k| &v[k][i])), s);
        }
        assert_eq!(v[3][3].to_string().matches('y').count(), 9);
    }
}
