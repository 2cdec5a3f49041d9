//! Python module `orthovar`. Exact values cross the boundary as strings such
//! as `"3/8"`, matrices as lists of rows.

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat};

use orthovar::interp::{exact_kernel, ExactOptions};
use orthovar::naive::{naive_equation, Axis};
use orthovar::ortho::{parse_rational, DoublyStochasticMatrix, Mat, PointSampler, ProjectivePoint};
use orthovar::poly;
use orthovar::variety;

fn err(e: orthovar::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn axis(name: &str) -> PyResult<Axis> {
    match name {
        "column" | "C" => Ok(Axis::Column),
        "row" | "R" => Ok(Axis::Row),
        _ => Err(PyValueError::new_err(format!("unknown axis `{name}`"))),
    }
}

#[pyclass(name = "Polynomial", frozen, module = "orthovar", from_py_object)]
#[derive(Clone)]
struct PyPolynomial(poly::Polynomial);

#[pymethods]
impl PyPolynomial {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        poly::Polynomial::from_text(text, None).map(PyPolynomial).map_err(err)
    }

    fn to_text(&self) -> PyResult<String> {
        self.0.to_text().map_err(err)
    }

    fn num_terms(&self) -> usize {
        self.0.num_terms()
    }

    fn degree(&self) -> Option<u32> {
        self.0.total_degree()
    }

    fn variables(&self) -> Vec<String> {
        self.0.ring().names().to_vec()
    }

    /// Exact value at rational coordinates, given in ring variable order.
    fn eval(&self, point: Vec<String>) -> PyResult<String> {
        let q = point.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        self.0.eval_rational(&q).map(|v| v.to_string()).map_err(err)
    }

    fn eval_float(&self, point: Vec<f64>) -> PyResult<f64> {
        self.0.eval_f64(&point).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Polynomial(terms={}, degree={:?})", self.0.num_terms(), self.0.total_degree())
    }
}

enum Entries {
    Exact(Mat<BigRational>),
    Float(Mat<f64>),
}

/// Any float entry switches the whole matrix to floating point.
fn read_matrix(rows: &Bound<'_, PyAny>) -> PyResult<Entries> {
    let rows: Vec<Vec<Bound<'_, PyAny>>> = rows.extract()?;
    if rows.iter().flatten().any(|x| x.is_instance_of::<PyFloat>()) {
        let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x.extract()).collect()).collect::<PyResult<_>>()?;
        return Mat::from_rows(m).map(Entries::Float).map_err(err);
    }
    let mut m = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut row = Vec::with_capacity(r.len());
        for x in r {
            row.push(parse_rational(&x.str()?.to_cow()?).map_err(err)?);
        }
        m.push(row);
    }
    Mat::from_rows(m).map(Entries::Exact).map_err(err)
}

fn certificate<'py>(py: Python<'py>, c: &variety::MembershipCertificate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", c.verdict.to_string())?;
    d.set_item("signs", c.signs.clone())?;
    d.set_item("residual", c.residual)?;
    d.set_item("exact", c.exact)?;
    d.set_item("patterns", c.patterns)?;
    Ok(d)
}

fn eq_report<'py>(py: Python<'py>, r: &variety::EquationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("failed", r.failed.clone())?;
    d.set_item("residual", r.residual)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (n, axis = "column", i = 1, j = 2))]
fn naive(n: usize, axis: &str, i: usize, j: usize) -> PyResult<PyPolynomial> {
    naive_equation(n, self::axis(axis)?, i, j).map(PyPolynomial).map_err(err)
}

/// `(dim, degree)` of the variety for `n x n` matrices.
#[pyfunction]
fn invariants(n: usize) -> PyResult<(u64, String)> {
    let v = variety::invariants(n).map_err(err)?;
    Ok((v.dim, v.degree.to_string()))
}

/// Projective sample points as rows of coordinate strings `[y.., s]`.
#[pyfunction]
#[pyo3(signature = (n, count, seed = 1))]
fn sample_points(n: usize, count: usize, seed: u64) -> Vec<Vec<String>> {
    PointSampler::new(n, seed)
        .points::<BigRational>(count)
        .iter()
        .map(|p| p.coords().iter().map(|c| c.to_string()).collect())
        .collect()
}

#[pyfunction]
#[pyo3(signature = (matrix, tol = variety::DEFAULT_MEMBERSHIP_TOL, allow_large = false))]
fn brute_force_membership<'py>(
    py: Python<'py>,
    matrix: &Bound<'py, PyAny>,
    tol: f64,
    allow_large: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let c = match read_matrix(matrix)? {
        Entries::Exact(m) => {
            let a = DoublyStochasticMatrix::new(m).map_err(err)?;
            py.detach(|| variety::brute_force_membership(&a, tol, allow_large))
        }
        Entries::Float(m) => {
            let a = DoublyStochasticMatrix::new(m).map_err(err)?;
            py.detach(|| variety::brute_force_membership(&a, tol, allow_large))
        }
    }
    .map_err(err)?;
    certificate(py, &c)
}

/// Tests a 4 x 4 doubly stochastic matrix against the shipped quintics and
/// the column octics.
#[pyfunction]
#[pyo3(signature = (matrix, tol = variety::DEFAULT_MEMBERSHIP_TOL))]
fn equation_membership<'py>(py: Python<'py>, matrix: &Bound<'py, PyAny>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let eqs = variety::Equations::shipped().map_err(err)?;
    let r = match read_matrix(matrix)? {
        Entries::Exact(m) => variety::equation_membership(&DoublyStochasticMatrix::new(m).map_err(err)?.project(), &eqs, tol),
        Entries::Float(m) => variety::equation_membership(&DoublyStochasticMatrix::new(m).map_err(err)?.project(), &eqs, tol),
    }
    .map_err(err)?;
    eq_report(py, &r)
}

/// `(passed, log10_failure_bound)` for the claim that `f` vanishes on the
/// whole variety.
#[pyfunction]
#[pyo3(signature = (f, trials = variety::DEFAULT_TRIALS, seed = 3))]
fn certify(py: Python<'_>, f: &PyPolynomial, trials: usize, seed: u64) -> PyResult<(bool, f64)> {
    let c = py.detach(|| variety::certify_identically_zero(&f.0, trials, seed)).map_err(err)?;
    Ok((c.passed, c.log10_failure_bound))
}

#[pyfunction]
#[pyo3(signature = (m, allow_large = false))]
fn hadamard_search(py: Python<'_>, m: usize, allow_large: bool) -> PyResult<Option<Vec<Vec<i8>>>> {
    py.detach(|| variety::hadamard_search(m, allow_large)).map_err(err)
}

#[pyfunction]
fn counterexample_matrix(n: usize) -> PyResult<Vec<Vec<String>>> {
    let a = variety::counterexample_matrix(n).map_err(err)?;
    Ok(a.matrix().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
}

/// Structured components as dicts with `id`, `dimension`, `generators`
/// (polynomial text) and `at_infinity`.
#[pyfunction]
fn component_catalog(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    variety::component_catalog()
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("id", &c.id)?;
            d.set_item("dimension", c.dimension)?;
            let gens = c.generators.iter().map(|g| g.to_text()).collect::<Result<Vec<_>, _>>().map_err(err)?;
            d.set_item("generators", gens)?;
            d.set_item("at_infinity", c.at_infinity)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn shipped_quintics() -> PyResult<Vec<PyPolynomial>> {
    Ok(variety::Equations::shipped().map_err(err)?.quintics.into_iter().map(PyPolynomial).collect())
}

/// Rank of the degree-`d` multiples of `gens`; defaults to the shipped quintics.
#[pyfunction]
#[pyo3(signature = (d, gens = None, seed = 7))]
fn multiplication_rank(py: Python<'_>, d: u32, gens: Option<Vec<PyPolynomial>>, seed: u64) -> PyResult<usize> {
    let gens = match gens {
        Some(g) => g.into_iter().map(|p| p.0).collect(),
        None => variety::Equations::shipped().map_err(err)?.quintics,
    };
    py.detach(|| variety::multiplication_rank(&gens, d, seed)).map_err(err)
}

/// Exact degree-`d` forms vanishing at `count` seeded sample points.
#[pyfunction]
#[pyo3(signature = (n, d, count, seed = 1))]
fn exact_kernel_of_samples(py: Python<'_>, n: usize, d: u32, count: usize, seed: u64) -> PyResult<Vec<PyPolynomial>> {
    let pts: Vec<ProjectivePoint<BigRational>> = PointSampler::new(n, seed).points(count);
    let kb = py.detach(|| exact_kernel(&pts, d, &ExactOptions::default())).map_err(err)?;
    Ok(kb.polynomials().unwrap_or_default().iter().cloned().map(PyPolynomial).collect())
}

#[pymodule]
#[pyo3(name = "orthovar")]
fn orthovar_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_function(wrap_pyfunction!(naive, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(sample_points, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_membership, m)?)?;
    m.add_function(wrap_pyfunction!(equation_membership, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(hadamard_search, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(component_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(shipped_quintics, m)?)?;
    m.add_function(wrap_pyfunction!(multiplication_rank, m)?)?;
    m.add_function(wrap_pyfunction!(exact_kernel_of_samples, m)?)?;
    Ok(())
}
