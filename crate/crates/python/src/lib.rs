//! Python bindings. Matrices cross the boundary as lists of lists and
//! reports as plain dicts.

use pyo3::exceptions::{PyIOError, PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use frink_core::balls::{self, Metric};
use frink_core::diffusion::{self, DEFAULT_EIGEN_TOL};
use frink_core::frink::{self as core, DiagonalBand, InverseVariant, LambdaOptions};
use frink_core::io::to_sorted_json;
use frink_core::kernel::{self, KernelFormat};
use frink_core::relation::{self, Inequality};
use frink_core::{Error, SquareMatrix};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e if e.is_numeric() => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for frink_core::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn variant(tag: &str) -> PyResult<InverseVariant> {
    tag.parse().or_py()
}

fn rows(m: &SquareMatrix) -> Vec<Vec<f64>> {
    m.to_rows()
}

/// Round-trips through JSON so nested reports arrive as dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = to_sorted_json(value).or_py()?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "AffinityMatrix", module = "frink", frozen)]
struct PyAffinity(kernel::AffinityMatrix);

#[pymethods]
impl PyAffinity {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        kernel::AffinityMatrix::from_rows(rows).map(Self).or_py()
    }

    /// `|i-j|^-alpha` off the diagonal, `diag` on it.
    #[staticmethod]
    #[pyo3(signature = (n, alpha, diag = 2.0))]
    fn newtonian(n: usize, alpha: f64, diag: f64) -> PyResult<Self> {
        kernel::newtonian_kernel(n, alpha, diag).map(Self).or_py()
    }

    /// CSV, or JSON when the name ends in `.json`.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        kernel::AffinityMatrix::load_auto(path).map(Self).or_py()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.0.save(path, KernelFormat::from_path(path.as_ref())).or_py()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.0.n() || j >= self.0.n() {
            return Err(PyIndexError::new_err(format!("({i}, {j}) out of range")));
        }
        Ok(self.0.get(i, j))
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        rows(self.0.values())
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &kernel::validate_kernel(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("AffinityMatrix(n={})", self.0.n())
    }
}

#[pyclass(name = "LambdaSequence", module = "frink", frozen)]
struct PyLambda(core::LambdaSequence);

#[pymethods]
impl PyLambda {
    #[staticmethod]
    fn from_values(values: Vec<f64>) -> PyResult<Self> {
        core::LambdaSequence::from_values(values).map(Self).or_py()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations()
    }

    /// Index of the last threshold.
    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[pyo3(signature = (t, variant = "script"))]
    fn inverse(&self, t: f64, variant: &str) -> PyResult<usize> {
        core::lambda_inverse(t, &self.0, self::variant(variant)?).or_py()
    }

    fn to_json(&self) -> PyResult<String> {
        to_sorted_json(&self.0).or_py()
    }

    fn __repr__(&self) -> String {
        format!("LambdaSequence({:?})", self.0.values())
    }
}

#[pyclass(name = "BinaryRelation", module = "frink", frozen, eq)]
#[derive(PartialEq)]
struct PyRelation(relation::BinaryRelation);

#[pymethods]
impl PyRelation {
    #[staticmethod]
    fn from_pairs(n: usize, pairs: Vec<(usize, usize)>) -> PyResult<Self> {
        relation::BinaryRelation::from_pairs(n, pairs).map(Self).or_py()
    }

    /// `{|i-j| <= half_width}`
    #[staticmethod]
    fn band(n: usize, half_width: usize) -> Self {
        Self(relation::BinaryRelation::band(n, half_width))
    }

    /// `{K >= t}`, or `{K > t}` when `strict`.
    #[staticmethod]
    #[pyo3(signature = (kernel, t, strict = false))]
    fn level_set(kernel: &PyAffinity, t: f64, strict: bool) -> Self {
        let ineq = if strict { Inequality::Strict } else { Inequality::NonStrict };
        Self(relation::level_set(&kernel.0, t, ineq))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn contains(&self, i: usize, j: usize) -> bool {
        i < self.0.n() && j < self.0.n() && self.0.contains(i, j)
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.pairs().collect()
    }

    fn compose(&self, other: &PyRelation) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).or_py()
    }

    fn power3(&self) -> Self {
        Self(self.0.power3())
    }

    fn is_subset_of(&self, other: &PyRelation) -> bool {
        self.0.is_subset_of(&other.0)
    }

    fn is_full(&self) -> bool {
        self.0.is_full()
    }

    /// Smallest `m` with a full `m`-th power, if any up to `max_m`.
    fn covering_index(&self, max_m: usize) -> Option<usize> {
        self.0.covering_index(max_m)
    }

    fn __len__(&self) -> usize {
        self.0.count()
    }
}

#[pyfunction]
#[pyo3(signature = (kernel, diagonal_band = 3, lambda0_override = None))]
fn compute_lambda_sequence(kernel: &PyAffinity, diagonal_band: u8, lambda0_override: Option<f64>) -> PyResult<PyLambda> {
    let options = LambdaOptions {
        diagonal_band: DiagonalBand::try_from(diagonal_band).or_py()?,
        lambda0_override,
    };
    core::compute_lambda_sequence_with(&kernel.0, &options).map(PyLambda).or_py()
}

#[pyfunction]
#[pyo3(signature = (kernel, lam, variant = "script"))]
fn delta_matrix(kernel: &PyAffinity, lam: &PyLambda, variant: &str) -> PyResult<Vec<Vec<f64>>> {
    Ok(rows(core::delta_matrix(&kernel.0, &lam.0, self::variant(variant)?).values()))
}

#[pyfunction]
fn chain_metric(kernel: &PyAffinity, lam: &PyLambda) -> Vec<Vec<f64>> {
    rows(core::frink_chain_metric(&kernel.0, &lam.0).values())
}

#[pyfunction]
#[pyo3(signature = (kernel, lam, variant = "script"))]
fn quasi_triangle_constant(kernel: &PyAffinity, lam: &PyLambda, variant: &str) -> PyResult<f64> {
    core::quasi_triangle_constant(&core::delta_matrix(&kernel.0, &lam.0, self::variant(variant)?)).or_py()
}

/// Full verification report as a dict; `report["passed"]` summarizes it.
#[pyfunction]
#[pyo3(signature = (kernel, lam = None, variant = "script"))]
fn verify<'py>(py: Python<'py>, kernel: &PyAffinity, lam: Option<&PyLambda>, variant: &str) -> PyResult<Bound<'py, PyAny>> {
    let computed;
    let lam = match lam {
        Some(l) => &l.0,
        None => {
            computed = core::compute_lambda_sequence(&kernel.0).or_py()?;
            &computed
        }
    };
    let report = core::verify_all(&kernel.0, lam, self::variant(variant)?).or_py()?;
    to_py(py, &report)
}

#[pyfunction]
fn graph_laplacian(kernel: &PyAffinity) -> PyResult<Vec<Vec<f64>>> {
    diffusion::graph_laplacian(&kernel.0).map(|m| rows(&m)).or_py()
}

/// `(eigenvalues, eigenvectors)` with eigenvalues ascending and
/// `eigenvectors[i][l]` the `i`-th component of the `l`-th vector.
#[pyfunction]
fn laplacian_spectrum(kernel: &PyAffinity) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = diffusion::laplacian_spectrum(&kernel.0, DEFAULT_EIGEN_TOL).or_py()?;
    Ok((d.eigenvalues().to_vec(), d.eigenvector_rows().to_vec()))
}

#[pyfunction]
#[pyo3(signature = (kernel, t, components = None))]
fn diffusion_distances(kernel: &PyAffinity, t: f64, components: Option<usize>) -> PyResult<Vec<Vec<f64>>> {
    let mut d = diffusion::laplacian_spectrum(&kernel.0, DEFAULT_EIGEN_TOL).or_py()?;
    if let Some(c) = components {
        d = d.truncated(c);
    }
    diffusion::diffusion_distance_matrix(&d, t).map(|m| rows(&m)).or_py()
}

/// Members of `{y : delta(center, y) < r}`.
#[pyfunction]
#[pyo3(signature = (kernel, lam, center, r, variant = "script"))]
fn delta_ball(kernel: &PyAffinity, lam: &PyLambda, center: usize, r: f64, variant: &str) -> PyResult<Vec<usize>> {
    balls::delta_ball(&kernel.0, &lam.0, center, r, self::variant(variant)?)
        .map(|b| b.members)
        .or_py()
}

/// Members of `{y : distances[y] < radius}`.
#[pyfunction]
fn distance_ball(distances: Vec<f64>, center: usize, radius: f64) -> PyResult<Vec<usize>> {
    balls::distance_ball(&distances, center, radius, Metric::D)
        .map(|b| b.members)
        .or_py()
}

#[pyfunction]
fn frink_annuli<'py>(py: Python<'py>, kernel: &PyAffinity, lam: &PyLambda, center: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &balls::frink_annuli(&kernel.0, &lam.0, center).or_py()?)
}

#[pyfunction]
fn annuli<'py>(py: Python<'py>, distances: Vec<f64>, center: usize, radii: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &balls::annuli(&distances, center, &radii).or_py()?)
}

#[pyfunction]
fn euclidean_distances(n: usize, center: usize) -> PyResult<Vec<f64>> {
    balls::euclidean_distances(n, center).or_py()
}

#[pyfunction]
fn jaccard(a: Vec<usize>, b: Vec<usize>) -> f64 {
    balls::jaccard(&a, &b)
}

#[pymodule]
fn frink(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAffinity>()?;
    m.add_class::<PyLambda>()?;
    m.add_class::<PyRelation>()?;
    m.add_function(wrap_pyfunction!(compute_lambda_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(delta_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(chain_metric, m)?)?;
    m.add_function(wrap_pyfunction!(quasi_triangle_constant, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(graph_laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(diffusion_distances, m)?)?;
    m.add_function(wrap_pyfunction!(delta_ball, m)?)?;
    m.add_function(wrap_pyfunction!(distance_ball, m)?)?;
    m.add_function(wrap_pyfunction!(frink_annuli, m)?)?;
    m.add_function(wrap_pyfunction!(annuli, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_distances, m)?)?;
    m.add_function(wrap_pyfunction!(jaccard, m)?)?;
    Ok(())
}
