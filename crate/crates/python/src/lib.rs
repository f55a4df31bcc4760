//! Python bindings: datasets, objectives, solver configuration, the three
//! solvers, certificate audits and the finite-difference gradient check.

use ncg_core::classic::{ClassicProblem, QUADRATIC_CONDITION};
use ncg_core::{
    certificate_check, check_gradient, generate_dataset, run_gradient_descent, run_restarted_ncg,
    run_semi_adaptive_gd, BetaFormula, CertificateReport, LossKind, Objective, RegressionDataset,
    RegressionObjective, RunResult, SolverConfig,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn from_kwargs<T: serde::de::DeserializeOwned>(py: Python<'_>, kwargs: &Bound<'_, PyDict>) -> PyResult<T> {
    let s: String = py.import("json")?.call_method1("dumps", (kwargs,))?.extract()?;
    serde_json::from_str(&s).map_err(value_error)
}

/// Robust-regression dataset `b = A z + 3ν₁ + ν₂`.
#[pyclass(name = "Dataset", module = "ncg", frozen)]
struct PyDataset {
    inner: RegressionDataset,
}

#[pymethods]
impl PyDataset {
    /// Deterministic dataset with `a_i ~ N(0, I)`, `z ~ N(0, 4I)`,
    /// `ν₁ ~ N(0, I)` and `ν₂ ~ Bernoulli(0.3)`.
    #[staticmethod]
    #[pyo3(signature = (n = 30, m = 60, seed = 0))]
    fn generate(n: usize, m: usize, seed: u64) -> PyResult<Self> {
        Ok(PyDataset {
            inner: generate_dataset(n, m, seed).map_err(value_error)?,
        })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyDataset {
            inner: RegressionDataset::from_json(s).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(value_error)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    /// Design matrix as a list of rows.
    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        (0..self.inner.m).map(|i| self.inner.row(i).to_vec()).collect()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b.clone()
    }

    /// Ground-truth coefficients, `None` for imported datasets.
    #[getter]
    fn z(&self) -> Option<Vec<f64>> {
        self.inner.intermediates.as_ref().map(|i| i.z.clone())
    }

    fn residuals(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if x.len() != self.inner.n {
            return Err(value_error(format!("expected {} coefficients, got {}", self.inner.n, x.len())));
        }
        Ok(self.inner.residuals(&x))
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, m={}, seed={})", self.inner.n, self.inner.m, self.inner.seed)
    }
}

fn parse_loss(loss: &str, c: Option<f64>) -> PyResult<LossKind> {
    match loss.to_ascii_uppercase().as_str() {
        "SMOOTHED_BIWEIGHT" => Ok(LossKind::SmoothedBiweight),
        "TUKEY" => match c {
            Some(c) if c > 0.0 && c.is_finite() => Ok(LossKind::Tukey { c }),
            Some(_) => Err(value_error("tukey threshold must be positive")),
            None => Ok(LossKind::tukey()),
        },
        other => Err(value_error(format!("unknown loss `{other}`"))),
    }
}

/// A smooth objective with value and gradient oracles.
#[pyclass(name = "Problem", module = "ncg", frozen)]
struct PyProblem {
    inner: Box<dyn Objective>,
    lipschitz: Option<f64>,
    label: String,
}

impl PyProblem {
    fn check_dim(&self, x: &[f64]) -> PyResult<()> {
        if x.len() == self.inner.dim() {
            Ok(())
        } else {
            Err(value_error(format!("expected dimension {}, got {}", self.inner.dim(), x.len())))
        }
    }
}

#[pymethods]
impl PyProblem {
    /// `f(x) = (1/m) Σ ψ(a_iᵀx − b_i)` with `loss` in
    /// {"SMOOTHED_BIWEIGHT", "TUKEY"}.
    #[staticmethod]
    #[pyo3(signature = (dataset, loss = "SMOOTHED_BIWEIGHT", c = None))]
    fn regression(dataset: PyRef<'_, PyDataset>, loss: &str, c: Option<f64>) -> PyResult<Self> {
        let kind = parse_loss(loss, c)?;
        let obj = RegressionObjective::new(dataset.inner.clone(), kind);
        Ok(PyProblem {
            lipschitz: Some(obj.lipschitz_bound()),
            label: format!("{kind:?} on {}", PyDataset::__repr__(&dataset)),
            inner: Box::new(obj),
        })
    }

    /// One of ROSENBROCK, CONVEX_QUADRATIC, RASTRIGIN_SMOOTH.
    #[staticmethod]
    fn classic(name: &str, n: usize) -> PyResult<Self> {
        let kind: ClassicProblem = name.parse().map_err(value_error)?;
        let lipschitz = match kind {
            ClassicProblem::ConvexQuadratic => Some(QUADRATIC_CONDITION),
            ClassicProblem::RastriginSmooth => Some(2.0 + 40.0 * std::f64::consts::PI.powi(2)),
            ClassicProblem::Rosenbrock => None,
        };
        Ok(PyProblem {
            inner: kind.build(n).map_err(value_error)?,
            lipschitz,
            label: format!("{kind}(n={n})"),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.check_dim(&x)?;
        Ok(self.inner.value(&x))
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&x)?;
        Ok(self.inner.gradient(&x))
    }

    /// Upper bound on the gradient Lipschitz constant, if one is known.
    fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Largest relative discrepancy against central differences.
    #[pyo3(signature = (x, h = 1e-6))]
    fn check_gradient(&self, x: Vec<f64>, h: f64) -> PyResult<f64> {
        self.check_dim(&x)?;
        if !(h > 0.0) {
            return Err(value_error("step must be positive"));
        }
        Ok(check_gradient(self.inner.as_ref(), &x, h))
    }

    fn __repr__(&self) -> String {
        format!("Problem({})", self.label)
    }
}

/// Solver parameters. Keyword arguments use the field names of
/// `to_dict()`; unknown names are rejected.
#[pyclass(name = "SolverConfig", module = "ncg", frozen)]
struct PySolverConfig {
    inner: SolverConfig,
}

fn parse_beta(beta: &str) -> PyResult<BetaFormula> {
    BetaFormula::parse(beta).map_err(value_error)
}

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(py: Python<'_>, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let inner: SolverConfig = match kwargs {
            Some(k) => from_kwargs(py, k)?,
            None => SolverConfig::default(),
        };
        inner.validate().map_err(value_error)?;
        Ok(PySolverConfig { inner })
    }

    /// Restarted NCG(p) with `q = (1 + p)/2`.
    #[staticmethod]
    #[pyo3(signature = (p, beta = "PRP+"))]
    fn restarted(p: f64, beta: &str) -> PyResult<Self> {
        let inner = SolverConfig::restarted(p, parse_beta(beta)?);
        inner.validate().map_err(value_error)?;
        Ok(PySolverConfig { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (beta = "PRP+"))]
    fn standard(beta: &str) -> PyResult<Self> {
        Ok(PySolverConfig {
            inner: SolverConfig::standard(parse_beta(beta)?),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (beta = "PRP+"))]
    fn orthogonality(beta: &str) -> PyResult<Self> {
        Ok(PySolverConfig {
            inner: SolverConfig::orthogonality(parse_beta(beta)?),
        })
    }

    #[staticmethod]
    fn gradient_descent() -> Self {
        PySolverConfig {
            inner: SolverConfig::gradient_descent(),
        }
    }

    /// Copy with the given fields changed.
    #[pyo3(signature = (**kwargs))]
    fn replace(&self, py: Python<'_>, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let merged = PyDict::new(py);
        merged.update(to_py(py, &self.inner)?.cast::<PyDict>()?.as_mapping())?;
        if let Some(k) = kwargs {
            merged.update(k.as_mapping())?;
        }
        Self::new(py, Some(&merged))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("SolverConfig({})", serde_json::to_string(&self.inner).unwrap_or_default())
    }
}

/// Outcome of a solver run.
#[pyclass(name = "RunResult", module = "ncg", frozen)]
struct PyRunResult {
    inner: RunResult,
}

#[pymethods]
impl PyRunResult {
    /// "CONVERGED", "BUDGET_EXHAUSTED" or "LINESEARCH_FAILED".
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.label()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn n_f(&self) -> usize {
        self.inner.n_f
    }

    #[getter]
    fn n_g(&self) -> usize {
        self.inner.n_g
    }

    #[getter]
    fn initial_f(&self) -> f64 {
        self.inner.initial_f
    }

    #[getter]
    fn final_f(&self) -> f64 {
        self.inner.final_f
    }

    #[getter]
    fn final_grad_norm(&self) -> f64 {
        self.inner.final_grad_norm
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.inner.tolerance
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[getter]
    fn restarts(&self) -> usize {
        self.inner.restarts
    }

    #[getter]
    fn restart_tests(&self) -> usize {
        self.inner.restart_tests
    }

    /// Percentage of restart tests that fired, `None` if none was made.
    #[getter]
    fn restart_pct(&self) -> Option<f64> {
        self.inner.restart_pct()
    }

    #[getter]
    fn failure(&self) -> Option<String> {
        self.inner.failure.clone()
    }

    /// Per-iteration records as a list of dicts.
    #[getter]
    fn trace<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.trace)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(status={}, iterations={}, final_grad_norm={:e})",
            self.inner.status.label(),
            self.inner.iterations,
            self.inner.final_grad_norm
        )
    }
}

/// Runs a solver from `x0` (zero vector by default).
///
/// `method` is "ncg" (conjugate gradient with the configured restart policy),
/// "gd" (Armijo gradient descent) or "semi_adaptive_gd".
#[pyfunction]
#[pyo3(signature = (problem, x0 = None, config = None, method = "ncg"))]
fn minimize(
    py: Python<'_>,
    problem: PyRef<'_, PyProblem>,
    x0: Option<Vec<f64>>,
    config: Option<PyRef<'_, PySolverConfig>>,
    method: &str,
) -> PyResult<PyRunResult> {
    let x0 = x0.unwrap_or_else(|| vec![0.0; problem.inner.dim()]);
    let obj = problem.inner.as_ref();
    let solve = match method {
        "ncg" => run_restarted_ncg,
        "gd" => run_gradient_descent,
        "semi_adaptive_gd" => run_semi_adaptive_gd,
        other => return Err(value_error(format!("unknown method `{other}`"))),
    };
    let config = match config {
        Some(c) => c.inner.clone(),
        None if method == "ncg" => SolverConfig::default(),
        None => SolverConfig::gradient_descent(),
    };
    let inner = py.detach(|| solve(obj, &x0, &config)).map_err(value_error)?;
    Ok(PyRunResult { inner })
}

/// Audits a run against the decrease, backtracking and iteration bounds;
/// returns the report as a dict with an added `passed` key.
#[pyfunction]
#[pyo3(signature = (result, config, l_bound = None, f_low = None))]
fn certificate<'py>(
    py: Python<'py>,
    result: PyRef<'_, PyRunResult>,
    config: PyRef<'_, PySolverConfig>,
    l_bound: Option<f64>,
    f_low: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let report: CertificateReport = certificate_check(&result.inner, &config.inner, l_bound, f_low);
    let d = to_py(py, &report)?;
    d.set_item("passed", report.passed())?;
    d.set_item("total_violations", report.total_violations())?;
    Ok(d)
}

#[pymodule]
fn ncg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    Ok(())
}
