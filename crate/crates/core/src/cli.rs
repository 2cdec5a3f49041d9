//! Command-line front end. Every stage reads and writes plain text files so
//! long runs can be resumed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::{
    exact_kernel, float_matrix, monomial_basis, numeric_kernel, ExactOptions, KernelBasis, KernelVectors, DEFAULT_TOL,
};
use crate::lattice::{integer_reconstruct, ReconstructOptions};
use crate::naive::{all_naive_equations, naive_equation, naive_equation_uncapped, Axis};
use crate::ortho::{DoublyStochasticMatrix, Mat, PointSampler, ProjectivePoint, Scalar};
use crate::poly::{read_poly_blocks, Polynomial};
use crate::variety::{
    brute_force_membership, certify_identically_zero, component_catalog, counterexample_matrix, equation_membership,
    hadamard_search, invariants, multiplication_rank, restrict_octics, verify_component, Equations, Verdict,
    DEFAULT_MEMBERSHIP_TOL, DEFAULT_TRIALS,
};

pub const POINTS_HEADER: &str = "# orthovar-points v1";

/// Degrees above this need `--heavy`.
const LIGHT_DEGREE: u32 = 6;

#[derive(Parser, Debug)]
#[command(name = "orthovar", version, about = "Equations and membership tests for orthostochastic matrices")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckMethod {
    Brute,
    Equations,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct OutArg {
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample points of Z_n by Cayley parametrization.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[command(flatten)]
        out: OutArg,
    },
    /// Naive equation C_ij or R_ij.
    Naive {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "column")]
        axis: Axis,
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
        /// Print the term count of every naive equation instead.
        #[arg(long)]
        all: bool,
        /// Allow n above the default cap.
        #[arg(long)]
        heavy: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Kernel of the evaluation matrix in one degree.
    Interpolate {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Primes used before the first lift attempt.
        #[arg(long, default_value_t = 2)]
        primes: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Read sample points from a file instead of sampling.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Allow degrees above 6.
        #[arg(long)]
        heavy: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Integer forms from a float kernel by lattice reduction.
    Reconstruct {
        kernel: PathBuf,
        #[arg(long, default_value_t = 10)]
        digits: u32,
        #[arg(long, default_value_t = 2)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Randomized test that forms vanish on Z_n.
    Certify {
        /// Kernel file or polynomial file.
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
    },
    /// Decide orthostochasticity of a matrix (JSON certificate).
    Check {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckMethod::Brute)]
        method: CheckMethod,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
        tol: f64,
        /// Quintic kernel file (default: the shipped quintics).
        #[arg(long)]
        equations: Option<PathBuf>,
        /// Allow n above 6.
        #[arg(long)]
        heavy: bool,
    },
    /// List the linear components of the quintic locus.
    Components {
        /// Check containment and tangent dimension of each.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        equations: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        seed: u64,
    },
    /// Restrict the octics to the entry-one components.
    Restrict {
        /// Octic file (default: C12, C13, C23).
        #[arg(long)]
        octics: Option<PathBuf>,
    },
    /// Dimension and degree of Z_n.
    Invariants {
        #[arg(long)]
        n: usize,
    },
    /// (1/6) J_6 padded with an identity block.
    Counterexample {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Normalized search for a Hadamard matrix.
    Hadamard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        heavy: bool,
    },
    /// Rank of multiplication by the quintics in one multiplier degree.
    Rank {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        equations: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// What a command produced: text for standard output or `--out`, and the exit
/// status (0 success, 1 failed verification).
struct Outcome {
    text: String,
    status: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, status: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(Error::Io)
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn points_to_text<T: Scalar>(n: usize, points: &[ProjectivePoint<T>]) -> String {
    let mode = if T::EXACT { "exact" } else { "float" };
    let mut out = format!("{POINTS_HEADER}\nn: {n}\nmode: {mode}\ncount: {}\n", points.len());
    for p in points {
        out.push_str(&p.to_text());
        out.push('\n');
    }
    out
}

pub fn points_from_text<T: Scalar>(text: &str) -> Result<(usize, Vec<ProjectivePoint<T>>)> {
    let mut lines = text.lines().enumerate();
    if lines.next().map(|(_, l)| l.trim_end()) != Some(POINTS_HEADER) {
        return Err(Error::parse(1, format!("expected `{POINTS_HEADER}`")));
    }
    let mut field = |key: &str| -> Result<String> {
        let (i, l) = lines.next().ok_or_else(|| Error::parse(0, format!("missing `{key}`")))?;
        l.strip_prefix(&format!("{key}:")).map(|v| v.trim().to_string()).ok_or_else(|| Error::parse(i + 1, format!("expected `{key}:`")))
    };
    let n: usize = field("n")?.parse().map_err(|_| Error::parse(2, "bad n"))?;
    let mode = field("mode")?;
    if mode != "exact" && mode != "float" {
        return Err(Error::parse(3, "mode must be exact or float"));
    }
    let count: usize = field("count")?.parse().map_err(|_| Error::parse(4, "bad count"))?;
    let points = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| ProjectivePoint::parse(n, l).map_err(|e| Error::parse(i + 1, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if points.len() != count {
        return Err(Error::Invalid(format!("count says {count}, found {}", points.len())));
    }
    Ok((n, points))
}

/// Rows used for an interpolation in degree `d`.
pub fn point_count(n: usize, d: u32) -> usize {
    let cols = monomial_basis((n - 1) * (n - 1) + 1, d).len();
    cols + cols.div_ceil(4)
}

fn load_equations(path: &Option<PathBuf>) -> Result<Equations> {
    match path {
        Some(p) => Equations::from_quintic_text(&read(p)?),
        None => Equations::shipped(),
    }
}

/// Polynomials of a kernel file (exact) or of a polynomial file.
fn load_polynomials(text: &str) -> Result<Vec<Polynomial>> {
    if text.starts_with(crate::interp::KERNEL_HEADER) {
        let kb = KernelBasis::from_text(text)?;
        return kb.polynomials().map(<[Polynomial]>::to_vec).ok_or_else(|| Error::Invalid("float kernel: run reconstruct first".into()));
    }
    Ok(read_poly_blocks(text)?.1)
}

#[derive(Serialize)]
struct CheckJson {
    verdict: Verdict,
    signs: Option<Vec<Vec<i8>>>,
    residual: f64,
    equations_failed: Option<Vec<String>>,
    exact: bool,
}

fn check_matrix<T: Scalar>(
    text: &str,
    method: CheckMethod,
    tol: f64,
    equations: &Option<PathBuf>,
    heavy: bool,
) -> Result<Outcome> {
    let ds = DoublyStochasticMatrix::new(Mat::<T>::parse(text)?)?;
    let mut json = CheckJson { verdict: Verdict::NotOrthostochastic, signs: None, residual: 0.0, equations_failed: None, exact: T::EXACT };
    if method != CheckMethod::Equations {
        let c = brute_force_membership(&ds, tol, heavy)?;
        json.verdict = c.verdict;
        json.signs = c.signs;
        json.residual = c.residual;
        json.exact = c.exact;
    }
    if method != CheckMethod::Brute {
        let eqs = load_equations(equations)?;
        let rep = equation_membership(&ds.project(), &eqs, tol)?;
        if method == CheckMethod::Equations {
            json.verdict = rep.verdict;
            json.residual = rep.residual;
        } else if json.verdict == Verdict::Orthostochastic && rep.verdict != Verdict::OnVarietyOnly {
            return Err(Error::Verification("sign search and equations disagree".into()));
        }
        json.equations_failed = Some(rep.failed);
    }
    let status = if json.verdict == Verdict::NotOrthostochastic { 1 } else { 0 };
    let text = serde_json::to_string_pretty(&json).map_err(|e| Error::Invalid(e.to_string()))? + "\n";
    Ok(Outcome { text, status })
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>)> {
    Ok(match cli.command {
        Command::Sample { n, count, seed, mode, out } => {
            if n < 2 {
                return Err(Error::Invalid("n must be at least 2".into()));
            }
            let mut sampler = PointSampler::new(n, seed);
            let text = match mode {
                Mode::Exact => points_to_text(n, &sampler.points::<BigRational>(count)),
                Mode::Float => points_to_text(n, &sampler.points::<f64>(count)),
            };
            (Outcome::ok(text), out.out)
        }
        Command::Naive { n, axis, i, j, all, heavy, out } => {
            if all {
                let mut text = String::new();
                for (axis, i, j, f) in all_naive_equations(n)? {
                    writeln!(text, "{}{i}{j} {}", axis.letter(), f.num_terms()).unwrap();
                }
                (Outcome::ok(text), out.out)
            } else {
                let f = if heavy { naive_equation_uncapped(n, axis, i, j)? } else { naive_equation(n, axis, i, j)? };
                (Outcome::ok(f.to_text()?), out.out)
            }
        }
        Command::Interpolate { n, degree, mode, seed, primes, tol, points, heavy, out } => {
            if degree > LIGHT_DEGREE && !heavy {
                return Err(Error::Invalid(format!("degree {degree} needs --heavy")));
            }
            let kb = match mode {
                Mode::Exact => {
                    let pts: Vec<ProjectivePoint<BigRational>> = match &points {
                        Some(p) => points_from_text(&read(p)?)?.1,
                        None => PointSampler::new(n, seed).points(point_count(n, degree)),
                    };
                    let opts = ExactOptions { initial_primes: primes.max(2), ..ExactOptions::default() };
                    exact_kernel(&pts, degree, &opts)?
                }
                Mode::Float => {
                    let pts: Vec<ProjectivePoint<f64>> = match &points {
                        Some(p) => points_from_text(&read(p)?)?.1,
                        None => PointSampler::new(n, seed).points(point_count(n, degree)),
                    };
                    let (m, basis) = float_matrix(&pts, degree)?;
                    let k = numeric_kernel(&m, tol)?;
                    eprintln!("gap {:e}", k.gap());
                    k.into_basis(pts[0].n(), degree, basis)
                }
            };
            eprintln!("dim {}", kb.dim());
            (Outcome::ok(kb.to_text()?), out.out)
        }
        Command::Reconstruct { kernel, digits, seed, out } => {
            let kb = KernelBasis::from_text(&read(&kernel)?)?;
            let verify: Vec<ProjectivePoint<BigRational>> = PointSampler::new(kb.n, seed).points(50);
            let rec = integer_reconstruct(&kb, &verify, &ReconstructOptions { digits, ..ReconstructOptions::default() })?;
            eprintln!("lattice dimension {} after {} rounds", rec.lattice_dim, rec.rounds);
            let exact = KernelBasis { vectors: KernelVectors::Exact(rec.polynomials), tol: None, ..kb };
            (Outcome::ok(exact.to_text()?), out.out)
        }
        Command::Certify { input, trials, seed } => {
            let polys = load_polynomials(&read(&input)?)?;
            let mut text = String::new();
            let mut status = 0;
            for (k, f) in polys.iter().enumerate() {
                let c = certify_identically_zero(f, trials, seed.wrapping_add(k as u64))?;
                if c.passed {
                    writeln!(text, "{} pass trials {} log10-bound {:.1}", k + 1, c.trials, c.log10_failure_bound).unwrap();
                } else {
                    status = 1;
                    let w = c.witness.map(|p| p.to_text()).unwrap_or_default();
                    writeln!(text, "{} fail at [{w}]", k + 1).unwrap();
                }
            }
            (Outcome { text, status }, None)
        }
        Command::Check { matrix, method, mode, tol, equations, heavy } => {
            let text = read(&matrix)?;
            let o = match mode {
                Mode::Exact => check_matrix::<BigRational>(&text, method, tol, &equations, heavy)?,
                Mode::Float => check_matrix::<f64>(&text, method, tol, &equations, heavy)?,
            };
            (o, None)
        }
        Command::Components { verify, equations, seed } => {
            let catalog = component_catalog();
            let mut text = String::new();
            let mut status = 0;
            let eqs = if verify { Some(load_equations(&equations)?) } else { None };
            for (k, c) in catalog.iter().enumerate() {
                let gens: Vec<String> = c.generators.iter().map(|g| g.to_string()).collect();
                write!(text, "{} dim {} {}", c.id, c.dimension, if c.at_infinity { "infinity" } else { "finite" }).unwrap();
                if let Some(eqs) = &eqs {
                    let r = verify_component(c, &eqs.quintics, seed.wrapping_add(k as u64))?;
                    if !r.confirmed() {
                        status = 1;
                    }
                    write!(
                        text,
                        " contained {} tangent {} {}",
                        r.containment_failures.is_empty(),
                        r.tangent_dimension,
                        if r.confirmed() { "ok" } else { "FAIL" }
                    )
                    .unwrap();
                }
                writeln!(text, " ({})", gens.join(", ")).unwrap();
            }
            (Outcome { text, status }, None)
        }
        Command::Restrict { octics } => {
            let ks = match &octics {
                Some(p) => load_polynomials(&read(p)?)?,
                None => crate::variety::octics(Axis::Column)?,
            };
            let mut text = String::new();
            let mut status = 0;
            for c in component_catalog().iter().filter(|c| c.dimension == 4) {
                let r = restrict_octics(c, &ks)?;
                let scalars: Vec<String> = r.scalars.iter().map(|s| s.as_ref().map_or("0".into(), |q| q.to_string())).collect();
                if !r.holds() {
                    status = 1;
                }
                writeln!(text, "{} {} f^2 x [{}]", c.id, if r.holds() { "ok" } else { "FAIL" }, scalars.join(", ")).unwrap();
            }
            (Outcome { text, status }, None)
        }
        Command::Invariants { n } => {
            let inv = invariants(n)?;
            (Outcome::ok(format!("dim {} deg {}\n", inv.dim, inv.degree)), None)
        }
        Command::Counterexample { n, out } => (Outcome::ok(counterexample_matrix(n)?.matrix().to_text()), out.out),
        Command::Hadamard { n, heavy } => {
            let text = match hadamard_search(n, heavy)? {
                Some(h) => h
                    .iter()
                    .map(|r| r.iter().map(|s| if *s > 0 { "+" } else { "-" }).collect::<String>() + "\n")
                    .collect(),
                None => "none\n".to_string(),
            };
            (Outcome::ok(text), None)
        }
        Command::Rank { degree, equations, seed } => {
            let eqs = load_equations(&equations)?;
            let r = multiplication_rank(&eqs.quintics, degree, seed)?;
            let full = eqs.quintics.len() * monomial_basis(10, degree).len();
            let status = if r == full { 0 } else { 1 };
            (Outcome { text: format!("rank {r} of {full}\n"), status }, None)
        }
    })
}

/// Parses `args` and runs one command; returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    match run(cli).and_then(|(o, out)| emit(&o.text, &out).map(|_| o.status)) {
        Ok(status) => status,
        Err(Error::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
