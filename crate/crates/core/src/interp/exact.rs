use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{build_matrix_mod_reduced, eval_integer_vectors, monomial_basis, KernelBasis, KernelVectors};
use crate::error::{Error, Result};
use crate::modular::{crt, random_primes, rational_reconstruction, PrimeField};
use crate::ortho::{PointSampler, ProjectivePoint};
use crate::poly::{Polynomial, Ring};

#[derive(Clone, Debug)]
pub struct ExactOptions {
    /// Primes used before the first reconstruction attempt (at least 2).
    pub initial_primes: usize,
    /// Give up after this many primes.
    pub max_primes: usize,
    pub prime_seed: u64,
    /// Fresh points every returned vector must vanish at.
    pub verify_points: usize,
    pub verify_seed: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { initial_primes: 2, max_primes: 64, prime_seed: 0x5eed, verify_points: 50, verify_seed: 0xfee1 }
    }
}

struct PrimeRun {
    prime: u64,
    pivots: Vec<usize>,
    kernel: Vec<Vec<u64>>,
}

fn run_prime(points: &[Vec<BigInt>], basis: &[crate::poly::Monomial], p: u64) -> Result<PrimeRun> {
    let field = PrimeField::new(p);
    let reduced: Vec<Vec<u64>> = points.iter().map(|c| c.iter().map(|x| field.from_bigint(x)).collect()).collect();
    let ech = build_matrix_mod_reduced(&reduced, basis, &field)?.echelon();
    let kernel = ech.kernel();
    Ok(PrimeRun { prime: p, pivots: ech.pivots, kernel })
}

/// Best runs: maximal rank, then the lexicographically smallest pivot set.
fn good_runs(runs: &[PrimeRun]) -> Vec<&PrimeRun> {
    let best = runs
        .iter()
        .map(|r| &r.pivots)
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
        .expect("at least one run");
    runs.iter().filter(|r| &r.pivots == best).collect()
}

fn reconstruct(runs: &[&PrimeRun]) -> Option<Vec<Vec<BigRational>>> {
    let moduli: Vec<u64> = runs.iter().map(|r| r.prime).collect();
    let dim = runs[0].kernel.len();
    let cols = runs[0].kernel.first().map_or(0, Vec::len);
    (0..dim)
        .into_par_iter()
        .map(|k| {
            (0..cols)
                .map(|c| {
                    let residues: Vec<u64> = runs.iter().map(|r| r.kernel[k][c]).collect();
                    if residues.iter().all(|&x| x == 0) {
                        return Some(BigRational::zero());
                    }
                    let (x, m) = crt(&residues, &moduli);
                    rational_reconstruction(&x, &m)
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

fn agrees(candidate: &[Vec<BigRational>], run: &PrimeRun) -> bool {
    let f = PrimeField::new(run.prime);
    candidate.iter().zip(&run.kernel).all(|(v, w)| {
        v.iter().zip(w).all(|(q, &r)| matches!(f.from_rational(q), Ok(x) if x == r))
    })
}

fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

/// Kernel of the degree-`d` evaluation matrix at `points`, computed modulo
/// word-size primes, lifted by CRT and rational reconstruction, and checked
/// by exact evaluation at fresh sample points.
pub fn exact_kernel(points: &[ProjectivePoint<BigRational>], d: u32, opts: &ExactOptions) -> Result<KernelBasis> {
    let n = points.first().map(|p| p.n()).ok_or_else(|| Error::Invalid("no sample points".into()))?;
    let nvars = (n - 1) * (n - 1) + 1;
    let basis = monomial_basis(nvars, d);
    if points.len() < basis.len() {
        return Err(Error::Invalid(format!("{} points for {} monomials", points.len(), basis.len())));
    }
    if opts.initial_primes < 2 {
        return Err(Error::Invalid("at least two primes are required".into()));
    }
    let ints: Vec<Vec<BigInt>> = points.iter().map(|p| p.integer_coords()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.prime_seed);
    let mut used: Vec<u64> = Vec::new();
    let mut runs: Vec<PrimeRun> = Vec::new();
    let mut next_prime = |used: &mut Vec<u64>| {
        let p = random_primes(&mut rng, 1, used)[0];
        used.push(p);
        p
    };
    for _ in 0..opts.initial_primes {
        let p = next_prime(&mut used);
        runs.push(run_prime(&ints, &basis, p)?);
    }
    let vectors = loop {
        if runs.len() > opts.max_primes {
            return Err(Error::Reconstruction(format!("no stable lift after {} primes", runs.len())));
        }
        let good = good_runs(&runs);
        if good[0].kernel.is_empty() {
            break Vec::new();
        }
        let candidate = if good.len() >= 2 { reconstruct(&good) } else { None };
        let check = run_prime(&ints, &basis, next_prime(&mut used))?;
        if let Some(c) = candidate {
            if check.pivots == good[0].pivots && agrees(&c, &check) {
                runs.push(check);
                break c;
            }
        }
        runs.push(check);
    };
    let good_pivots = good_runs(&runs)[0].pivots.clone();
    let int_vectors: Vec<Vec<BigInt>> = vectors.iter().map(|v| primitive(v)).collect();
    let fresh: Vec<Vec<BigInt>> = PointSampler::new(n, opts.verify_seed)
        .points::<BigRational>(opts.verify_points)
        .iter()
        .map(ProjectivePoint::integer_coords)
        .collect();
    let values = eval_integer_vectors(&int_vectors, &basis, &fresh);
    if let Some((pt, _)) = values.iter().enumerate().find(|(_, vals)| vals.iter().any(|v| !v.is_zero())) {
        return Err(Error::Verification(format!("kernel vector does not vanish at verification point {pt}")));
    }
    let ring = Ring::projective(n);
    let polys = int_vectors
        .iter()
        .map(|v| {
            let coeffs: Vec<BigRational> = v.iter().map(|c| BigRational::from_integer(c.clone())).collect();
            Polynomial::from_coefficient_vector(&ring, &basis, &coeffs).map(|p| p.normalized())
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(polys.iter().all(|p| p.leading_term().map_or(true, |(_, c)| c.is_positive())));
    Ok(KernelBasis {
        n,
        degree: d,
        basis,
        vectors: KernelVectors::Exact(polys),
        primes: runs.iter().filter(|r| r.pivots == good_pivots).map(|r| r.prime).collect(),
        tol: None,
    })
}
