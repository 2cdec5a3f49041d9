//! Kernel basis files.
//!
//! ```text
//! # orthovar-kernel v1
//! n: 4
//! degree: 5
//! mode: exact
//! primes: 1073741827 1073741831 1073741833
//! count: 6
//! # orthovar-poly v1
//! ...
//! ```
//!
//! Float kernels use `mode: float`, a `tol:` line, and one
//! `# orthovar-fvec v1` block per vector holding `<coefficient> <exponents>`
//! lines for its nonzero entries.

use std::collections::HashMap;

use super::monomial_basis;
use crate::error::{Error, Result};
use crate::poly::{read_poly_blocks, Monomial, Polynomial};

pub const KERNEL_HEADER: &str = "# orthovar-kernel v1";
pub const FVEC_HEADER: &str = "# orthovar-fvec v1";

#[derive(Clone, Debug, PartialEq)]
pub enum KernelVectors {
    /// Primitive integer forms, normalized.
    Exact(Vec<Polynomial>),
    /// Coefficient vectors over the monomial basis.
    Float(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelBasis {
    pub n: usize,
    pub degree: u32,
    pub basis: Vec<Monomial>,
    pub vectors: KernelVectors,
    /// Primes the exact lift used.
    pub primes: Vec<u64>,
    /// Relative singular value threshold of a float kernel.
    pub tol: Option<f64>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        match &self.vectors {
            KernelVectors::Exact(v) => v.len(),
            KernelVectors::Float(v) => v.len(),
        }
    }

    pub fn polynomials(&self) -> Option<&[Polynomial]> {
        match &self.vectors {
            KernelVectors::Exact(v) => Some(v),
            KernelVectors::Float(_) => None,
        }
    }

    pub fn float_vectors(&self) -> Option<&[Vec<f64>]> {
        match &self.vectors {
            KernelVectors::Float(v) => Some(v),
            KernelVectors::Exact(_) => None,
        }
    }

    pub fn to_text(&self) -> Result<String> {
        let mut out = format!("{KERNEL_HEADER}\nn: {}\ndegree: {}\n", self.n, self.degree);
        match &self.vectors {
            KernelVectors::Exact(polys) => {
                out.push_str("mode: exact\n");
                let primes: Vec<String> = self.primes.iter().map(u64::to_string).collect();
                out.push_str(&format!("primes: {}\n", primes.join(" ")));
                out.push_str(&format!("count: {}\n", polys.len()));
                for p in polys {
                    out.push_str(&p.to_text()?);
                }
            }
            KernelVectors::Float(vecs) => {
                out.push_str("mode: float\n");
                out.push_str(&format!("tol: {:?}\n", self.tol.unwrap_or(super::DEFAULT_TOL)));
                out.push_str(&format!("count: {}\n", vecs.len()));
                for v in vecs {
                    out.push_str(FVEC_HEADER);
                    out.push('\n');
                    for (c, m) in v.iter().zip(&self.basis) {
                        if *c != 0.0 {
                            out.push_str(&format!("{c:?}"));
                            for e in m.exponents() {
                                out.push_str(&format!(" {e}"));
                            }
                            out.push('\n');
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<KernelBasis> {
        let mut lines = text.lines();
        if lines.next().map(str::trim_end) != Some(KERNEL_HEADER) {
            return Err(Error::parse(1, format!("expected `{KERNEL_HEADER}`")));
        }
        let mut fields: HashMap<String, String> = HashMap::new();
        let mut body_start = 1;
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.starts_with('#') {
                body_start = i;
                break;
            }
            body_start = i + 1;
            if let Some((k, v)) = line.split_once(':') {
                fields.insert(k.trim().to_string(), v.trim().to_string());
            } else if !line.trim().is_empty() {
                return Err(Error::parse(i + 1, "expected `key: value`"));
            }
        }
        let get = |k: &str| fields.get(k).ok_or_else(|| Error::parse(1, format!("missing `{k}`")));
        let n: usize = get("n")?.parse().map_err(|_| Error::parse(2, "bad n"))?;
        let degree: u32 = get("degree")?.parse().map_err(|_| Error::parse(3, "bad degree"))?;
        let count: usize = get("count")?.parse().map_err(|_| Error::parse(1, "bad count"))?;
        let nvars = (n - 1) * (n - 1) + 1;
        let basis = monomial_basis(nvars, degree);
        let body: Vec<&str> = text.lines().skip(body_start).collect();
        let (vectors, primes, tol) = match get("mode")?.as_str() {
            "exact" => {
                let primes = get("primes")?
                    .split_whitespace()
                    .map(|p| p.parse::<u64>().map_err(|_| Error::parse(1, "bad prime")))
                    .collect::<Result<Vec<_>>>()?;
                let (_, polys) = read_poly_blocks(&body.join("\n"))?;
                if polys.iter().any(|p| p.ring().nvars() != nvars || p.homogeneous_degree().is_some_and(|d| d != degree)) {
                    return Err(Error::Invalid("kernel polynomial has the wrong ring or degree".into()));
                }
                (KernelVectors::Exact(polys), primes, None)
            }
            "float" => {
                let tol: f64 = get("tol")?.parse().map_err(|_| Error::parse(1, "bad tol"))?;
                let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let mut vecs: Vec<Vec<f64>> = Vec::new();
                for (i, line) in body.iter().enumerate() {
                    let ln = body_start + i + 1;
                    let line = line.trim();
                    if line == FVEC_HEADER {
                        vecs.push(vec![0.0; basis.len()]);
                        continue;
                    }
                    if line.is_empty() {
                        continue;
                    }
                    let v = vecs.last_mut().ok_or_else(|| Error::parse(ln, "entry before vector header"))?;
                    let mut it = line.split_whitespace();
                    let c: f64 = it.next().unwrap().parse().map_err(|_| Error::parse(ln, "bad coefficient"))?;
                    let exps = it
                        .map(|e| e.parse::<u16>().map_err(|_| Error::parse(ln, "bad exponent")))
                        .collect::<Result<Vec<_>>>()?;
                    let m = Monomial::new(exps);
                    let k = index.get(&m).ok_or_else(|| Error::parse(ln, "monomial outside the basis"))?;
                    v[*k] = c;
                }
                (KernelVectors::Float(vecs), Vec::new(), Some(tol))
            }
            other => return Err(Error::Invalid(format!("unknown mode `{other}`"))),
        };
        let kb = KernelBasis { n, degree, basis, vectors, primes, tol };
        if kb.dim() != count {
            return Err(Error::Invalid(format!("count says {count}, found {}", kb.dim())));
        }
        Ok(kb)
    }
}
