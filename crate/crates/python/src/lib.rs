//! Python bindings for the Gaussian network simulator: covariance states,
//! the two network models, steady-state and transient solvers, and the
//! correlation metrics. Input errors raise ValueError; runtime failures
//! (unstable drift, unphysical states, non-convergence) raise RuntimeError.

use cvgn::{
    BipartitionSpec, CovarianceMatrix, DriftDiffusion, FigureId, FullParams, MeanFieldState,
    Metric, ModelKind, ModelParams, SimplifiedParams,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

fn err(e: cvgn::Error) -> PyErr {
    match e.exit_code() {
        1 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(
            "expected a non-empty rectangular list of rows",
        ));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    match value {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_py_any(py),
            (None, Some(f)) => f.into_py_any(py),
            _ => Err(PyValueError::new_err("metadata number out of range")),
        },
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// Symmetrized covariance matrix of an n-mode Gaussian state in the
/// (x1, y1, x2, y2, ...) quadrature ordering; the vacuum is identity / 2.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Covariance {
    inner: CovarianceMatrix,
}

#[pymethods]
impl Covariance {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = CovarianceMatrix::new(matrix_from_rows(&rows)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn vacuum(n_modes: usize) -> Self {
        Self {
            inner: CovarianceMatrix::vacuum(n_modes),
        }
    }

    #[staticmethod]
    fn thermal(occupations: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CovarianceMatrix::thermal(&occupations).map_err(err)?,
        })
    }

    #[staticmethod]
    fn two_mode_squeezed(r: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CovarianceMatrix::two_mode_squeezed(r).map_err(err)?,
        })
    }

    /// The matrix entries as a list of rows.
    fn rows(&self) -> Vec<Vec<f64>> {
        rows_from_matrix(self.inner.matrix())
    }

    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    fn symplectic_eigenvalues(&self) -> PyResult<Vec<f64>> {
        cvgn::symplectic_eigenvalues(&self.inner).map_err(err)
    }

    fn is_physical(&self) -> PyResult<bool> {
        self.inner.is_physical().map_err(err)
    }

    /// Reduced state over the given modes, in the given order.
    fn reduce(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: cvgn::reduce_modes(&self.inner, &keep).map_err(err)?,
        })
    }

    fn partial_transpose(&self, modes: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: cvgn::partial_transpose(&self.inner, &modes).map_err(err)?,
        })
    }

    /// Congruence transform S C S^T by a symplectic matrix given as rows.
    fn rotate(&self, symplectic_rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let s = matrix_from_rows(&symplectic_rows)?;
        Ok(Self {
            inner: cvgn::rotate_basis(&self.inner, &s).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Covariance(n_modes={})", self.inner.n_modes())
    }
}

/// Parameters of the passive two-cavity network with directional thermal
/// inputs. Rates are angular (rad/s).
#[pyclass(name = "SimplifiedParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PySimplifiedParams {
    inner: SimplifiedParams,
}

#[pymethods]
impl PySimplifiedParams {
    #[new]
    #[pyo3(signature = (eta=0.0, n_in=0.0, kappa=None, omega_c=None))]
    fn new(eta: f64, n_in: f64, kappa: Option<f64>, omega_c: Option<f64>) -> PyResult<Self> {
        let mut p = SimplifiedParams {
            eta,
            n_in,
            ..SimplifiedParams::default()
        };
        if let Some(k) = kappa {
            p.kappa = k;
        }
        if let Some(w) = omega_c {
            p.omega_c = w;
        }
        p.validate().map_err(err)?;
        Ok(Self { inner: p })
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[getter]
    fn n_in(&self) -> f64 {
        self.inner.n_in
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn omega_c(&self) -> f64 {
        self.inner.omega_c
    }

    fn __repr__(&self) -> String {
        format!(
            "SimplifiedParams(eta={}, n_in={}, kappa={}, omega_c={})",
            self.inner.eta, self.inner.n_in, self.inner.kappa, self.inner.omega_c
        )
    }
}

/// Parameters of the full driven optomechanical network. Rates are angular
/// (rad/s); unspecified rates take the reference setup values, with delta0
/// defaulting to the red sideband of the default mechanical frequency.
#[pyclass(name = "FullParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyFullParams {
    inner: FullParams,
}

#[pymethods]
impl PyFullParams {
    #[new]
    #[pyo3(signature = (eta=0.0, n_m=0.0, n_in=0.0, omega_m=None, gamma=None, delta0=None,
                        kappa=None, g0=None, drive_e=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        eta: f64,
        n_m: f64,
        n_in: f64,
        omega_m: Option<f64>,
        gamma: Option<f64>,
        delta0: Option<f64>,
        kappa: Option<f64>,
        g0: Option<f64>,
        drive_e: Option<f64>,
    ) -> PyResult<Self> {
        let mut p = FullParams {
            eta,
            n_m,
            n_in,
            ..FullParams::default()
        };
        if let Some(v) = omega_m {
            p.omega_m = v;
        }
        if let Some(v) = gamma {
            p.gamma = v;
        }
        if let Some(v) = delta0 {
            p.delta0 = v;
        }
        if let Some(v) = kappa {
            p.kappa = v;
        }
        if let Some(v) = g0 {
            p.g0 = v;
        }
        if let Some(v) = drive_e {
            p.drive_e = v;
        }
        p.validate().map_err(err)?;
        Ok(Self { inner: p })
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[getter]
    fn n_m(&self) -> f64 {
        self.inner.n_m
    }

    #[getter]
    fn n_in(&self) -> f64 {
        self.inner.n_in
    }

    #[getter]
    fn omega_m(&self) -> f64 {
        self.inner.omega_m
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn delta0(&self) -> f64 {
        self.inner.delta0
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn g0(&self) -> f64 {
        self.inner.g0
    }

    #[getter]
    fn drive_e(&self) -> f64 {
        self.inner.drive_e
    }

    fn __repr__(&self) -> String {
        format!(
            "FullParams(eta={}, n_m={}, n_in={})",
            self.inner.eta, self.inner.n_m, self.inner.n_in
        )
    }
}

/// Classical steady amplitudes of the driven network.
#[pyclass(name = "MeanFieldState", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyMeanFieldState {
    inner: MeanFieldState,
}

#[pymethods]
impl PyMeanFieldState {
    #[staticmethod]
    fn zero() -> Self {
        Self {
            inner: MeanFieldState::zero(),
        }
    }

    #[getter]
    fn a_bar_1(&self) -> Complex64 {
        self.inner.a_bar_1
    }

    #[getter]
    fn a_bar_2(&self) -> Complex64 {
        self.inner.a_bar_2
    }

    #[getter]
    fn q_bar_1(&self) -> f64 {
        self.inner.q_bar_1
    }

    #[getter]
    fn q_bar_2(&self) -> f64 {
        self.inner.q_bar_2
    }

    #[getter]
    fn p_bar_1(&self) -> f64 {
        self.inner.p_bar_1
    }

    #[getter]
    fn p_bar_2(&self) -> f64 {
        self.inner.p_bar_2
    }

    fn __repr__(&self) -> String {
        format!(
            "MeanFieldState(a_bar_1={}, a_bar_2={})",
            self.inner.a_bar_1, self.inner.a_bar_2
        )
    }
}

/// Drift matrix A and diffusion matrix D of a linear quantum network,
/// dC/dt = A C + C A^T + D, with one label per mode.
#[pyclass(name = "DriftDiffusion", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDriftDiffusion {
    inner: DriftDiffusion,
}

#[pymethods]
impl PyDriftDiffusion {
    #[new]
    fn new(
        drift: Vec<Vec<f64>>,
        diffusion: Vec<Vec<f64>>,
        mode_labels: Vec<String>,
    ) -> PyResult<Self> {
        let a = matrix_from_rows(&drift)?;
        let d = matrix_from_rows(&diffusion)?;
        Ok(Self {
            inner: DriftDiffusion::new(a, d, mode_labels).map_err(err)?,
        })
    }

    #[getter]
    fn drift(&self) -> Vec<Vec<f64>> {
        rows_from_matrix(self.inner.drift())
    }

    #[getter]
    fn diffusion(&self) -> Vec<Vec<f64>> {
        rows_from_matrix(self.inner.diffusion())
    }

    #[getter]
    fn mode_labels(&self) -> Vec<String> {
        self.inner.mode_labels().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("DriftDiffusion(modes={:?})", self.inner.mode_labels())
    }
}

fn model_params(obj: &Bound<'_, PyAny>) -> PyResult<ModelParams> {
    if let Ok(p) = obj.extract::<PySimplifiedParams>() {
        return Ok(ModelParams::Simplified(p.inner));
    }
    if let Ok(p) = obj.extract::<PyFullParams>() {
        return Ok(ModelParams::Full(p.inner));
    }
    Err(PyValueError::new_err(
        "expected SimplifiedParams or FullParams",
    ))
}

/// Bosonic entropy contribution f(x) of a scaled symplectic eigenvalue.
#[pyfunction]
fn entropy_f(x: f64) -> PyResult<f64> {
    cvgn::entropy_f(x).map_err(err)
}

/// Gaussian discord of a two-mode state under measurement of one party.
#[pyfunction]
#[pyo3(signature = (c, measured_party=0))]
fn gaussian_discord(c: &Covariance, measured_party: usize) -> PyResult<f64> {
    cvgn::gaussian_discord(&c.inner, measured_party).map_err(err)
}

#[pyfunction]
fn log_negativity_two_mode(c: &Covariance) -> PyResult<f64> {
    cvgn::log_negativity_two_mode(&c.inner).map_err(err)
}

#[pyfunction]
fn log_negativity_bipartition(
    c: &Covariance,
    party_a: Vec<usize>,
    party_b: Vec<usize>,
) -> PyResult<f64> {
    let spec = BipartitionSpec::new(party_a, party_b);
    cvgn::log_negativity_bipartition(&c.inner, &spec).map_err(err)
}

#[pyfunction]
fn build_simplified(params: &PySimplifiedParams) -> PyResult<PyDriftDiffusion> {
    Ok(PyDriftDiffusion {
        inner: cvgn::build_simplified(&params.inner).map_err(err)?,
    })
}

#[pyfunction]
fn mean_field(params: &PyFullParams) -> PyResult<PyMeanFieldState> {
    Ok(PyMeanFieldState {
        inner: cvgn::mean_field(&params.inner).map_err(err)?,
    })
}

#[pyfunction]
fn build_full_linearized(
    params: &PyFullParams,
    mf: &PyMeanFieldState,
) -> PyResult<PyDriftDiffusion> {
    Ok(PyDriftDiffusion {
        inner: cvgn::build_full_linearized(&params.inner, &mf.inner).map_err(err)?,
    })
}

/// (is_stable, spectral_abscissa) of a drift matrix.
#[pyfunction]
fn stability(dd: &PyDriftDiffusion) -> (bool, f64) {
    cvgn::stability(&dd.inner)
}

#[pyfunction]
fn solve_steady(dd: &PyDriftDiffusion) -> PyResult<Covariance> {
    Ok(Covariance {
        inner: cvgn::solve_steady(&dd.inner).map_err(err)?,
    })
}

/// Steady covariance of either model directly from its parameters.
#[pyfunction]
fn steady_state(params: &Bound<'_, PyAny>) -> PyResult<Covariance> {
    Ok(Covariance {
        inner: cvgn::steady_state(&model_params(params)?).map_err(err)?,
    })
}

/// Integrate dC/dt = A C + C A^T + D from c0; returns (times, states) with a
/// snapshot every `sample_every` steps plus the endpoints.
#[pyfunction]
#[pyo3(signature = (dd, c0, t_final, dt, sample_every=1))]
fn evolve_covariance(
    dd: &PyDriftDiffusion,
    c0: &Covariance,
    t_final: f64,
    dt: f64,
    sample_every: usize,
) -> PyResult<(Vec<f64>, Vec<Covariance>)> {
    let traj =
        cvgn::evolve_covariance(&dd.inner, &c0.inner, t_final, dt, sample_every).map_err(err)?;
    let states = traj
        .states
        .into_iter()
        .map(|inner| Covariance { inner })
        .collect();
    Ok((traj.times, states))
}

#[pyfunction]
fn evolve_mean(
    params: &PyFullParams,
    initial: &PyMeanFieldState,
    t_final: f64,
    dt: f64,
) -> PyResult<PyMeanFieldState> {
    Ok(PyMeanFieldState {
        inner: cvgn::evolve_mean(&params.inner, &initial.inner, t_final, dt).map_err(err)?,
    })
}

/// Evaluate a named metric ("discord_o1o2", "ln_oooo_mm", ...) on a steady
/// or transient state of the given model ("simplified" or "full").
#[pyfunction]
fn evaluate_metric(name: &str, model: &str, c: &Covariance) -> PyResult<f64> {
    let metric: Metric = name.parse().map_err(err)?;
    let kind: ModelKind = model.parse().map_err(err)?;
    metric.evaluate(kind, &c.inner).map_err(err)
}

/// Log negativities (e_plus, e_minus, e_cross) of the collective
/// superposition pairs of a swap-symmetric 4-mode state.
#[pyfunction]
fn plus_minus_decomposition(c: &Covariance) -> PyResult<(f64, f64, f64)> {
    cvgn::plus_minus_decomposition(&c.inner).map_err(err)
}

/// Mechanical bath occupation where the collective optical-mechanical
/// entanglement dies, located by bisection over [low, high].
#[pyfunction]
#[pyo3(signature = (params, low=0.0, high=400.0))]
fn find_threshold(params: &PyFullParams, low: f64, high: f64) -> PyResult<f64> {
    cvgn::find_threshold(&params.inner, (low, high)).map_err(err)
}

/// Sweep one parameter over a grid of steady states. Returns a dict with
/// "variable", "grid", "stable", "columns" (metric name -> values, None at
/// unstable points) and "metadata".
#[pyfunction]
#[pyo3(signature = (params, variable, grid, metrics=None))]
fn sweep(
    py: Python<'_>,
    params: &Bound<'_, PyAny>,
    variable: &str,
    grid: Vec<f64>,
    metrics: Option<Vec<String>>,
) -> PyResult<Py<PyAny>> {
    let mp = model_params(params)?;
    let metrics: Vec<Metric> = match metrics {
        Some(names) => names
            .iter()
            .map(|s| s.parse().map_err(err))
            .collect::<PyResult<_>>()?,
        None => Metric::defaults_for(mp.kind()).to_vec(),
    };
    let result = cvgn::sweep(&mp, variable, &grid, &metrics).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("variable", result.variable_name)?;
    dict.set_item("grid", result.grid)?;
    dict.set_item("stable", result.stable)?;
    let columns = PyDict::new(py);
    for column in result.columns {
        columns.set_item(column.name, column.values)?;
    }
    dict.set_item("columns", columns)?;
    dict.set_item("metadata", json_to_py(py, &result.metadata)?)?;
    Ok(dict.into_any().unbind())
}

/// Dataset behind one of the built-in figures ("fig2a" ... "figA9").
/// Returns a dict with "headers", "rows" (None marks absent values) and
/// "metadata".
#[pyfunction]
#[pyo3(signature = (figure, grid_points=None, t_final_kappa=None, sample_every=None))]
fn figure_dataset(
    py: Python<'_>,
    figure: &str,
    grid_points: Option<usize>,
    t_final_kappa: Option<f64>,
    sample_every: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let id: FigureId = figure.parse().map_err(err)?;
    let mut opts = cvgn::figure_defaults(id);
    if grid_points.is_some() {
        opts.grid_points = grid_points;
    }
    if t_final_kappa.is_some() {
        opts.t_final_kappa = t_final_kappa;
    }
    if sample_every.is_some() {
        opts.sample_every = sample_every;
    }
    let table = cvgn::figure_dataset(id, &opts).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("headers", table.headers)?;
    dict.set_item("rows", table.rows)?;
    dict.set_item("metadata", json_to_py(py, &table.metadata)?)?;
    Ok(dict.into_any().unbind())
}

#[pymodule]
fn cvgn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Covariance>()?;
    m.add_class::<PySimplifiedParams>()?;
    m.add_class::<PyFullParams>()?;
    m.add_class::<PyMeanFieldState>()?;
    m.add_class::<PyDriftDiffusion>()?;
    m.add_function(wrap_pyfunction!(entropy_f, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_discord, m)?)?;
    m.add_function(wrap_pyfunction!(log_negativity_two_mode, m)?)?;
    m.add_function(wrap_pyfunction!(log_negativity_bipartition, m)?)?;
    m.add_function(wrap_pyfunction!(build_simplified, m)?)?;
    m.add_function(wrap_pyfunction!(mean_field, m)?)?;
    m.add_function(wrap_pyfunction!(build_full_linearized, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(solve_steady, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_mean, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_metric, m)?)?;
    m.add_function(wrap_pyfunction!(plus_minus_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(find_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(figure_dataset, m)?)?;
    m.add("ENTANGLEMENT_CUTOFF", cvgn::analysis::ENTANGLEMENT_CUTOFF)?;
    Ok(())
}
