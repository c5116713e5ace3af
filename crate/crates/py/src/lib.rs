//! Python module `vr3c`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use vr3c_core as engine;
use engine::baselines::Scheme;
use engine::harness::SimDefaults;
use engine::matrix::MatrixSource;

fn to_py(err: engine::Error) -> PyErr {
    match err {
        engine::Error::Io { .. } => PyIOError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[pyclass(name = "Instance", module = "vr3c", from_py_object)]
#[derive(Clone)]
struct PyInstance(engine::Instance);

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        engine::Instance::load(path).map(PyInstance).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        engine::Instance::from_json_str(text, None).map(PyInstance).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json_string()
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.0.save(path).map_err(to_py)
    }

    /// Constraint violations as readable strings; empty when valid.
    fn validate(&self) -> Vec<String> {
        self.0.validate().violations.iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn users(&self) -> usize {
        self.0.users()
    }

    #[getter]
    fn contents(&self) -> usize {
        self.0.contents()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<f64>> {
        self.0.matrix.rows().to_vec()
    }

    #[getter]
    fn seed(&self) -> Option<u64> {
        self.0.seed
    }

    fn __repr__(&self) -> String {
        format!("Instance(users={}, contents={})", self.0.users(), self.0.contents())
    }
}

#[pyclass(name = "SolveResult", module = "vr3c")]
struct PySolveResult(engine::SolveResult);

#[pymethods]
impl PySolveResult {
    #[getter]
    fn max_cost(&self) -> f64 {
        self.0.max_cost
    }

    #[getter]
    fn min_cost(&self) -> f64 {
        self.0.min_cost()
    }

    #[getter]
    fn per_user_costs(&self) -> Vec<f64> {
        self.0.per_user_costs.clone()
    }

    #[getter]
    fn bandwidth(&self) -> Vec<f64> {
        self.0.policy.bandwidth.clone()
    }

    #[getter]
    fn cache(&self) -> Vec<Vec<bool>> {
        self.0.policy.cache.clone()
    }

    #[getter]
    fn compute(&self) -> Vec<Vec<bool>> {
        self.0.policy.compute.clone()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn trace(&self) -> Vec<f64> {
        self.0.trace.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(max_cost={}, iterations={}, converged={})",
            self.0.max_cost,
            self.0.iterations,
            if self.0.converged { "True" } else { "False" }
        )
    }
}

/// Draws an instance from the default simulation parameters.
#[pyfunction]
#[pyo3(signature = (seed, users = 5, contents = 10, cache_capacity = 4))]
fn sample_instance(seed: u64, users: usize, contents: usize, cache_capacity: usize) -> PyInstance {
    let defaults = SimDefaults { users, contents, cache_capacity, ..SimDefaults::default() };
    PyInstance(engine::harness::sample_instance(&defaults, seed))
}

#[pyfunction]
#[pyo3(signature = (instance, scheme = "proposed"))]
fn solve(instance: &PyInstance, scheme: &str) -> PyResult<PySolveResult> {
    let scheme: Scheme = scheme.parse().map_err(to_py)?;
    instance.0.ensure_valid().map_err(to_py)?;
    engine::baselines::run(scheme, &instance.0).map(PySolveResult).map_err(to_py)
}

/// Uplink rate in bit/s of user `user` holding `share` of the band.
#[pyfunction]
fn transmission_rate(instance: &PyInstance, user: usize, share: f64) -> PyResult<f64> {
    if user >= instance.0.users() {
        return Err(PyValueError::new_err(format!("no user {user}")));
    }
    engine::cost::transmission_rate(share, &instance.0.channel, user).map_err(to_py)
}

/// Builds a request-probability matrix. `kind` is uniform, zipf, random or file.
#[pyfunction]
#[pyo3(signature = (kind, rows, cols, gamma = 1.0, seed = 0, path = None))]
fn build_matrix(
    kind: &str,
    rows: usize,
    cols: usize,
    gamma: f64,
    seed: u64,
    path: Option<std::path::PathBuf>,
) -> PyResult<Vec<Vec<f64>>> {
    let source = match (kind, path) {
        ("uniform", _) => MatrixSource::Uniform,
        ("zipf", _) => MatrixSource::Zipf { gamma },
        ("random", _) => MatrixSource::RandomRows { seed },
        ("file", Some(path)) => MatrixSource::FromFile { path },
        ("file", None) => return Err(PyValueError::new_err("kind 'file' needs a path")),
        _ => return Err(PyValueError::new_err(format!("unknown matrix kind '{kind}'"))),
    };
    let matrix = engine::matrix::build_matrix(&source, rows, cols).map_err(to_py)?;
    Ok(matrix.rows().to_vec())
}

#[pyfunction]
fn convergence_trace(instance: &PyInstance) -> PyResult<Vec<f64>> {
    instance.0.ensure_valid().map_err(to_py)?;
    engine::solver::convergence_trace(&instance.0).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "vr3c")]
fn vr3c_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(sample_instance, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(transmission_rate, m)?)?;
    m.add_function(wrap_pyfunction!(build_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_trace, m)?)?;
    Ok(())
}
