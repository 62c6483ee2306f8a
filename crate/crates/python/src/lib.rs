//! Python bindings: problems, single runs, benches and the grid oracle.

use std::sync::{Arc, Mutex};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use unilip::bench::{BenchConfig, Reliability, ReportFormat};
use unilip::oracle;
use unilip::testbed::{load_fixture, pinter_problem, pinter_suite};
use unilip::{make_method, Exhausted, MethodConfig, MethodId, RunResult, SolveError};

type Slot = Arc<Mutex<Option<PyErr>>>;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn callable(f: Py<PyAny>, slot: Slot) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    move |x| {
        Python::attach(
            |py| match f.bind(py).call1((x,)).and_then(|v| v.extract::<f64>()) {
                Ok(v) => v,
                Err(e) => {
                    let mut guard = slot.lock().unwrap();
                    if guard.is_none() {
                        *guard = Some(e);
                    }
                    f64::NAN
                }
            },
        )
    }
}

/// A minimization problem on `[a, b]`.
#[pyclass(name = "Problem", module = "unilip_py", frozen)]
#[derive(Clone)]
struct PyProblem {
    inner: unilip::Problem,
    slot: Slot,
}

impl PyProblem {
    fn native(inner: unilip::Problem) -> Self {
        Self {
            inner,
            slot: Arc::default(),
        }
    }

    fn raise_captured(&self) -> PyResult<()> {
        match self.slot.lock().unwrap().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (name, a, b, f, df=None, lipschitz=None, derivative_lipschitz=None, known_min_x=None, known_min_f=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: String,
        a: f64,
        b: f64,
        f: Py<PyAny>,
        df: Option<Py<PyAny>>,
        lipschitz: Option<f64>,
        derivative_lipschitz: Option<f64>,
        known_min_x: Option<f64>,
        known_min_f: Option<f64>,
    ) -> PyResult<Self> {
        let slot = Slot::default();
        let mut p =
            unilip::Problem::new(name, a, b, callable(f, slot.clone())).map_err(value_error)?;
        if let Some(df) = df {
            p = p.with_derivative(callable(df, slot.clone()));
        }
        if let Some(l) = lipschitz {
            p = p.with_lipschitz(l).map_err(value_error)?;
        }
        if let Some(m) = derivative_lipschitz {
            p = p.with_derivative_lipschitz(m).map_err(value_error)?;
        }
        Ok(Self {
            inner: p.with_known_minimum(known_min_x, known_min_f),
            slot,
        })
    }

    /// Loads a fixture file.
    #[staticmethod]
    fn from_fixture(path: std::path::PathBuf) -> PyResult<Self> {
        load_fixture(path).map(Self::native).map_err(value_error)
    }

    /// Member of the [-5, 5] test class with minimizer `x_star`.
    #[staticmethod]
    fn pinter(x_star: f64) -> PyResult<Self> {
        pinter_problem(x_star)
            .map(Self::native)
            .map_err(value_error)
    }

    /// Seeded suite of `count` test-class members.
    #[staticmethod]
    #[pyo3(signature = (seed=2009, count=100))]
    fn pinter_suite(seed: u64, count: usize) -> Vec<Self> {
        pinter_suite(seed, count)
            .into_iter()
            .map(|i| Self::native(i.problem))
            .collect()
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.b()
    }

    #[getter]
    fn has_derivative(&self) -> bool {
        self.inner.has_derivative()
    }

    #[getter]
    fn known_min_x(&self) -> Option<f64> {
        self.inner.known_min_x()
    }

    #[getter]
    fn known_min_f(&self) -> Option<f64> {
        self.inner.known_min_f()
    }

    fn eval(&self, x: f64) -> PyResult<f64> {
        let v = self.inner.eval(x);
        self.raise_captured()?;
        Ok(v)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, a={}, b={})",
            self.inner.name(),
            self.inner.a(),
            self.inner.b()
        )
    }
}

/// Outcome of one run.
#[pyclass(name = "RunResult", module = "unilip_py", frozen)]
struct PyRunResult {
    inner: RunResult,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn best_x(&self) -> f64 {
        self.inner.best_x
    }

    #[getter]
    fn best_f(&self) -> f64 {
        self.inner.best_f
    }

    #[getter]
    fn n_trials(&self) -> usize {
        self.inner.n_trials
    }

    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.as_str()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method_label
    }

    /// Trials in evaluation order as `(x, z, dz)` tuples.
    #[getter]
    fn trials(&self) -> Vec<(f64, f64, Option<f64>)> {
        self.inner.trials.iter().map(|t| (t.x, t.z, t.dz)).collect()
    }

    fn trace_csv(&self) -> String {
        self.inner.trace_csv()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(method={}, n_trials={}, best_x={}, best_f={}, status={})",
            self.inner.method_label,
            self.inner.n_trials,
            self.inner.best_x,
            self.inner.best_f,
            self.inner.status
        )
    }
}

fn parse_method(label: &str) -> PyResult<MethodId> {
    label.parse().map_err(value_error)
}

fn exhausted(li_fallback: bool) -> Exhausted {
    if li_fallback {
        Exhausted::MinCharacteristic
    } else {
        Exhausted::Adjacent
    }
}

/// Minimizes `problem` with the method named by `method`.
#[pyfunction]
#[pyo3(signature = (problem, method, r=1.1, eps=unilip::problem::DEFAULT_EPS, eps_relative=true, delta=None, li_fallback=false, xi=unilip::problem::DEFAULT_XI, max_trials=unilip::problem::DEFAULT_MAX_TRIALS))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    problem: &PyProblem,
    method: &str,
    r: f64,
    eps: f64,
    eps_relative: bool,
    delta: Option<f64>,
    li_fallback: bool,
    xi: f64,
    max_trials: usize,
) -> PyResult<PyRunResult> {
    let id = parse_method(method)?;
    let mut config = MethodConfig::new(id.scheme, id.estimator, id.selector)
        .with_r(r)
        .with_eps(eps, eps_relative)
        .with_xi(xi)
        .with_exhausted(exhausted(li_fallback))
        .with_max_trials(max_trials);
    config.delta = delta;
    let method = make_method(config).map_err(value_error)?;
    let outcome = py.detach(|| method.run(&problem.inner));
    problem.raise_captured()?;
    match outcome {
        Ok(inner) => Ok(PyRunResult { inner }),
        Err(e @ SolveError::Rejected(_)) => Err(value_error(e)),
        Err(e @ SolveError::Run(_)) => Err(PyRuntimeError::new_err(e.to_string())),
    }
}

/// Runs every method on every problem and returns the rendered report.
#[pyfunction(name = "bench")]
#[pyo3(signature = (problems, methods=None, r=None, r_auto=false, eps=unilip::problem::DEFAULT_EPS, eps_relative=true, delta=None, li_fallback=false, format="csv", parallel=0, oracle_grid=oracle::DEFAULT_GRID))]
#[allow(clippy::too_many_arguments)]
fn run_bench(
    py: Python<'_>,
    problems: Vec<PyRef<'_, PyProblem>>,
    methods: Option<Vec<String>>,
    r: Option<f64>,
    r_auto: bool,
    eps: f64,
    eps_relative: bool,
    delta: Option<f64>,
    li_fallback: bool,
    format: &str,
    parallel: usize,
    oracle_grid: usize,
) -> PyResult<String> {
    if r.is_some() && r_auto {
        return Err(PyValueError::new_err("r and r_auto are exclusive"));
    }
    let format: ReportFormat = format.parse().map_err(value_error)?;
    let mut config = BenchConfig {
        eps,
        eps_relative,
        delta,
        exhausted: exhausted(li_fallback),
        reliability: if r_auto {
            Reliability::PROTOCOL
        } else {
            Reliability::Fixed(r.unwrap_or(1.1))
        },
        parallel,
        oracle_grid,
        ..BenchConfig::default()
    };
    if let Some(labels) = methods {
        config.methods = labels
            .iter()
            .map(|l| parse_method(l))
            .collect::<PyResult<_>>()?;
    }
    let natives: Vec<unilip::Problem> = problems.iter().map(|p| p.inner.clone()).collect();
    let report = py.detach(|| {
        unilip::bench::prepare_problems(&natives, &config)
            .and_then(|ps| unilip::bench::run_bench(&ps, &config))
    });
    for p in &problems {
        p.raise_captured()?;
    }
    Ok(report.map_err(value_error)?.render(format))
}

/// Grid minimum and sampled Lipschitz constants.
#[pyfunction]
#[pyo3(signature = (problem, grid=oracle::DEFAULT_GRID))]
fn oracle_report<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = py.detach(|| oracle::report(&problem.inner, grid));
    problem.raise_captured()?;
    let r = report.map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("grid_n", r.grid_n)?;
    out.set_item("x_min", r.x_min)?;
    out.set_item("f_min", r.f_min)?;
    out.set_item("l_hat", r.l_hat)?;
    out.set_item("m_hat", r.m_hat)?;
    Ok(out)
}

/// Labels of the twelve methods.
#[pyfunction]
fn methods() -> Vec<&'static str> {
    MethodId::ALL.iter().map(MethodId::label).collect()
}

#[pymodule]
fn unilip_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_report, m)?)?;
    m.add_function(wrap_pyfunction!(methods, m)?)?;
    Ok(())
}
