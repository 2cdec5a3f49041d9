//! Implicitization by interpolation: evaluate every monomial of one degree
//! at sample points of `Z_n` and read equations off the kernel.

mod exact;
mod file;
mod numeric;

pub use exact::{exact_kernel, ExactOptions};
pub use file::{KernelBasis, KernelVectors, FVEC_HEADER, KERNEL_HEADER};
pub use numeric::{float_matrix, numeric_kernel, NumericKernel};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::modular::{ModMatrix, PrimeField};
use crate::ortho::ProjectivePoint;
use crate::poly::{monomials_of_degree, Monomial};

/// Default relative singular value threshold.
pub const DEFAULT_TOL: f64 = 1e-8;

/// All monomials of total degree `d` in `nvars` variables, descending.
pub fn monomial_basis(nvars: usize, d: u32) -> Vec<Monomial> {
    monomials_of_degree(nvars, d)
}

/// `C(n, k)` as a `u128`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Values of every basis monomial at `point`, via per-variable power tables.
pub fn monomial_values<T: Clone>(point: &[T], basis: &[Monomial], one: T, mul: impl Fn(&T, &T) -> T) -> Vec<T> {
    let d = basis.iter().map(|m| m.degree()).max().unwrap_or(0) as usize;
    let table: Vec<Vec<T>> = point
        .iter()
        .map(|x| {
            let mut pw = vec![one.clone()];
            for k in 0..d {
                let next = mul(&pw[k], x);
                pw.push(next);
            }
            pw
        })
        .collect();
    basis
        .iter()
        .map(|m| {
            let mut acc: Option<T> = None;
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    let f = &table[v][e as usize];
                    acc = Some(match acc {
                        None => f.clone(),
                        Some(a) => mul(&a, f),
                    });
                }
            }
            acc.unwrap_or_else(|| one.clone())
        })
        .collect()
}

/// Where the rows of an evaluation matrix came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub n: usize,
    pub degree: u32,
    pub seed: Option<u64>,
}

/// Points x monomials matrix with entries of type `E`.
#[derive(Clone, Debug)]
pub struct EvaluationMatrix<E> {
    pub provenance: Provenance,
    pub basis: Vec<Monomial>,
    pub rows: usize,
    pub data: Vec<E>,
}

impl<E> EvaluationMatrix<E> {
    pub fn cols(&self) -> usize {
        self.basis.len()
    }

    pub fn row(&self, r: usize) -> &[E] {
        let c = self.cols();
        &self.data[r * c..(r + 1) * c]
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols() + c]
    }
}

fn check_points<T: crate::ortho::Scalar>(points: &[ProjectivePoint<T>]) -> Result<usize> {
    let n = points.first().map(|p| p.n()).ok_or_else(|| Error::Invalid("no sample points".into()))?;
    if let Some(p) = points.iter().find(|p| p.n() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: p.n() });
    }
    Ok(n)
}

/// Exact rational evaluation matrix.
pub fn build_matrix_exact(points: &[ProjectivePoint<BigRational>], d: u32) -> Result<EvaluationMatrix<BigRational>> {
    let n = check_points(points)?;
    let basis = monomial_basis((n - 1) * (n - 1) + 1, d);
    let mut data = Vec::with_capacity(points.len() * basis.len());
    for p in points {
        data.extend(monomial_values(p.coords(), &basis, BigRational::one(), |a, b| a * b));
    }
    Ok(EvaluationMatrix { provenance: Provenance { n, degree: d, seed: None }, rows: points.len(), basis, data })
}

/// Evaluation matrix of integer representatives reduced modulo `field`.
/// Reducing the primitive integer coordinates makes the row a nonzero
/// multiple of the rational row, so the kernel is unchanged.
pub fn build_matrix_mod(points: &[ProjectivePoint<BigRational>], d: u32, field: &PrimeField) -> Result<ModMatrix> {
    let n = check_points(points)?;
    let basis = monomial_basis((n - 1) * (n - 1) + 1, d);
    let reduced: Vec<Vec<u64>> =
        points.iter().map(|p| p.integer_coords().iter().map(|c| field.from_bigint(c)).collect()).collect();
    build_matrix_mod_reduced(&reduced, &basis, field)
}

pub(crate) fn build_matrix_mod_reduced(points: &[Vec<u64>], basis: &[Monomial], field: &PrimeField) -> Result<ModMatrix> {
    if points.iter().all(|p| p.iter().all(|&c| c == 0)) && !points.is_empty() {
        return Err(Error::DenominatorDivisible(field.modulus()));
    }
    let cols = basis.len();
    let mut m = ModMatrix::zeros(points.len(), cols, *field);
    use rayon::prelude::*;
    m.data.par_chunks_mut(cols).zip(points.par_iter()).for_each(|(row, p)| {
        let vals = monomial_values(p, basis, 1u64, |a, b| field.mul(*a, *b));
        for (x, v) in row.iter_mut().zip(vals) {
            *x = v as u32;
        }
    });
    Ok(m)
}

/// Integer evaluation of integer coefficient vectors at integer points,
/// sharing one monomial value table per point.
pub fn eval_integer_vectors(vectors: &[Vec<BigInt>], basis: &[Monomial], points: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|p| {
            let vals = monomial_values(p, basis, BigInt::one(), |a, b| a * b);
            vectors
                .iter()
                .map(|v| v.iter().zip(&vals).filter(|(c, _)| !num_traits::Zero::is_zero(*c)).map(|(c, x)| c * x).sum())
                .collect()
        })
        .collect()
}
