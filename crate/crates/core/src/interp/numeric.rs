use faer::Mat;

use super::{monomial_basis, monomial_values, KernelBasis, KernelVectors};
use crate::error::{Error, Result};
use crate::ortho::ProjectivePoint;
use crate::poly::Monomial;

/// Float evaluation matrix with every row scaled to unit Euclidean norm.
pub fn float_matrix(points: &[ProjectivePoint<f64>], d: u32) -> Result<(Mat<f64>, Vec<Monomial>)> {
    let n = points.first().map(|p| p.n()).ok_or_else(|| Error::Invalid("no sample points".into()))?;
    let basis = monomial_basis((n - 1) * (n - 1) + 1, d);
    let mut m = Mat::<f64>::zeros(points.len(), basis.len());
    for (r, p) in points.iter().enumerate() {
        if p.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.n() });
        }
        let vals = monomial_values(p.coords(), &basis, 1.0f64, |a, b| a * b);
        let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        for (c, v) in vals.into_iter().enumerate() {
            m[(r, c)] = v * scale;
        }
    }
    Ok((m, basis))
}

#[derive(Clone, Debug)]
pub struct NumericKernel {
    /// Orthonormal kernel vectors (right singular vectors).
    pub vectors: Vec<Vec<f64>>,
    /// All singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    pub tol: f64,
}

impl NumericKernel {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Ratio between the smallest retained and the largest discarded
    /// singular value, a measure of how clear the rank decision was.
    pub fn gap(&self) -> f64 {
        let k = self.singular_values.len() - self.dim();
        match (k.checked_sub(1).map(|i| self.singular_values[i]), self.singular_values.get(k)) {
            (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
            _ => f64::INFINITY,
        }
    }

    pub fn into_basis(self, n: usize, degree: u32, basis: Vec<Monomial>) -> KernelBasis {
        KernelBasis { n, degree, basis, vectors: KernelVectors::Float(self.vectors), primes: Vec::new(), tol: Some(self.tol) }
    }
}

/// Right singular vectors whose singular value is at most `tol * σ_max`.
pub fn numeric_kernel(m: &Mat<f64>, tol: f64) -> Result<NumericKernel> {
    if m.nrows() < m.ncols() {
        return Err(Error::Invalid(format!("{} rows for {} columns", m.nrows(), m.ncols())));
    }
    let svd = m.thin_svd().map_err(|_| Error::SvdNoConvergence)?;
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let v = svd.V();
    let vectors = (0..s.len())
        .filter(|&i| s[i] <= tol * smax)
        .map(|i| (0..v.nrows()).map(|r| v[(r, i)]).collect())
        .collect();
    Ok(NumericKernel { vectors, singular_values: s, tol })
}
