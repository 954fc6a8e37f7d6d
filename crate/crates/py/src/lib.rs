//! Python bindings: scenarios, runs, sweeps, solvers and the conditioning
//! toolkit. Matrices cross the boundary as lists of rows of complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use risense::harness::{self, SweepKind};
use risense::linalg::{CMatrix, CVector};
use risense::metrics;
use risense::reconstruction::{self as rec, LsOptions, Regularization, RwfInit, RwfOptions};
use risense::spectral::{self, RankLayout, ResolutionQuery};
use risense::Error;

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.root() {
        Error::NonConvergence { .. } => PyRuntimeError::new_err(msg),
        Error::Io { .. } | Error::Csv(_) => PyOSError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("matrix must be a non-empty list of equal-length rows"));
    }
    Ok(CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn vector(v: Vec<Complex64>) -> CVector {
    CVector::from_vec(v)
}

fn list(v: &CVector) -> Vec<Complex64> {
    v.iter().copied().collect()
}

/// Experiment description, loaded from TOML or built from the four-panel
/// example.
#[pyclass(name = "Scenario", from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: harness::Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner = harness::Scenario::from_toml(text).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: harness::load_scenario(path).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn table_one() -> Self {
        Self {
            inner: harness::Scenario::table_one(),
        }
    }

    fn to_toml(&self) -> String {
        self.inner.canonical()
    }

    fn hash(&self) -> String {
        self.inner.hash()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn snr_db(&self) -> Option<f64> {
        self.inner.noise.snr_db
    }

    #[setter]
    fn set_snr_db(&mut self, snr_db: Option<f64>) {
        self.inner.noise.snr_db = snr_db;
        self.inner.noise.variance = None;
    }

    /// Set every panel's snapshot count.
    fn set_snapshots(&mut self, t: usize) {
        for p in &mut self.inner.panels {
            p.snapshots = t;
        }
    }

    /// Set every panel's elements per row.
    fn set_elements(&mut self, n: usize) {
        for p in &mut self.inner.panels {
            p.elements = n;
        }
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(py_err)
    }

    /// Synthesize measurements, reconstruct and score.
    fn run(&self) -> PyResult<PyRun> {
        self.inner.validate().map_err(py_err)?;
        let r = harness::run_scenario(&self.inner).map_err(py_err)?;
        Ok(PyRun::from(r))
    }

    /// Run and write field, spectrum, metrics and scenario artifacts to `out`.
    fn emit(&self, out: &str) -> PyResult<Vec<String>> {
        self.inner.validate().map_err(py_err)?;
        let r = harness::run_scenario(&self.inner).map_err(py_err)?;
        let a = harness::emit_outputs(&r, std::path::Path::new(out)).map_err(py_err)?;
        Ok([a.field_csv, a.field_pgm, a.spectrum_csv, a.metrics_json, a.scenario_toml]
            .iter()
            .map(|p| p.display().to_string())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(panels={}, seed={}, hash={})",
            self.inner.panels.len(),
            self.inner.seed,
            self.inner.short_hash()
        )
    }
}

/// Outcome of one scenario run.
#[pyclass(name = "Run", frozen, get_all, skip_from_py_object)]
struct PyRun {
    estimate: Vec<Complex64>,
    truth: Vec<Complex64>,
    relative_error: f64,
    ssim: f64,
    rank: usize,
    rank_bound: usize,
    condition_number: f64,
    singular_values: Vec<f64>,
    iterations: usize,
    converged: bool,
    peak_index: usize,
    /// `(angle_rad, magnitude)` for angular RoIs.
    peaks: Vec<(f64, f64)>,
}

impl From<harness::RunRecord> for PyRun {
    fn from(r: harness::RunRecord) -> Self {
        let m = &r.metrics;
        Self {
            estimate: list(&r.estimate),
            truth: list(r.roi.field()),
            relative_error: m.relative_error,
            ssim: m.ssim,
            rank: m.rank,
            rank_bound: m.rank_bound,
            condition_number: m.condition_number,
            singular_values: r.spectrum.singular_values.clone(),
            iterations: m.iterations,
            converged: m.converged,
            peak_index: m.peak_index,
            peaks: r
                .doa
                .map(|d| d.peaks.iter().map(|p| (p.angle, p.magnitude)).collect())
                .unwrap_or_default(),
        }
    }
}

#[pymethods]
impl PyRun {
    fn __repr__(&self) -> String {
        format!(
            "Run(relative_error={:.3e}, ssim={:.4}, rank={}/{}, cond={:.3e})",
            self.relative_error, self.ssim, self.rank, self.rank_bound, self.condition_number
        )
    }
}

type SweepRow = (f64, f64, f64, f64, f64);

/// Average a scenario over seeds at each sweep value. `kind` is
/// "measurements", "elements" or "snr". Returns one tuple per
/// value: `(value, relative_error, ssim, condition_number, rank)`.
#[pyfunction]
#[pyo3(signature = (scenario, kind, values, seeds = 5))]
fn sweep(scenario: &PyScenario, kind: &str, values: Vec<f64>, seeds: usize) -> PyResult<Vec<SweepRow>> {
    let kind = match kind {
        "measurements" => SweepKind::Measurements,
        "elements" => SweepKind::Elements,
        "snr" => SweepKind::Snr,
        other => return Err(PyValueError::new_err(format!("unknown sweep kind {other:?}"))),
    };
    let rows = harness::run_sweep(&scenario.inner, kind, &values, seeds).map_err(py_err)?;
    Ok(rows
        .iter()
        .map(|r| (r.value, r.relative_error, r.ssim, r.condition_number, r.rank))
        .collect())
}

/// Least squares `Ê = H†S`; `ridge` or `truncate` select regularization.
#[pyfunction]
#[pyo3(signature = (h, s, ridge = None, truncate = None))]
fn ls_solve(h: Vec<Vec<Complex64>>, s: Vec<Complex64>, ridge: Option<f64>, truncate: Option<f64>) -> PyResult<Vec<Complex64>> {
    let regularization = match (ridge, truncate) {
        (None, None) => Regularization::None,
        (Some(weight), None) => Regularization::Ridge { weight },
        (None, Some(cutoff)) => Regularization::TruncatedSvd { cutoff },
        _ => return Err(PyValueError::new_err("choose at most one of ridge and truncate")),
    };
    let sol = rec::ls_solve(&matrix(h)?, &vector(s), &LsOptions { regularization }).map_err(py_err)?;
    Ok(list(&sol.field))
}

/// Magnitude-only recovery; returns `(field, converged, iterations)`.
#[pyfunction]
#[pyo3(signature = (h, y, max_iters = 2000, step = 0.5, tolerance = 1e-8))]
fn rwf_solve(
    h: Vec<Vec<Complex64>>,
    y: Vec<f64>,
    max_iters: usize,
    step: f64,
    tolerance: f64,
) -> PyResult<(Vec<Complex64>, bool, usize)> {
    let opts = RwfOptions {
        max_iters,
        step,
        tolerance,
        eta: None,
        init: RwfInit::Spectral,
    };
    let sol = rec::rwf_solve(&matrix(h)?, &y, &opts).map_err(py_err)?;
    Ok((list(&sol.field), sol.converged, sol.iterations))
}

/// `min_c ‖e^{jc}Ê − E‖/‖E‖` when `phase_aware`, else `‖Ê − E‖/‖E‖`.
#[pyfunction]
#[pyo3(signature = (estimate, truth, phase_aware = false))]
fn relative_error(estimate: Vec<Complex64>, truth: Vec<Complex64>, phase_aware: bool) -> PyResult<f64> {
    metrics::relative_error(&vector(estimate), &vector(truth), phase_aware).map_err(py_err)
}

/// SSIM of the magnitude maps.
#[pyfunction]
fn field_ssim(estimate: Vec<Complex64>, truth: Vec<Complex64>) -> PyResult<f64> {
    metrics::field_ssim(&vector(estimate), &vector(truth)).map_err(py_err)
}

/// Singular values (descending) of a complex matrix.
#[pyfunction]
fn singular_values(h: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    Ok(risense::linalg::singular_values(&matrix(h)?))
}

/// Rank bound for dedicated receivers, `blocks = [(T_k, N_k), ...]`.
#[pyfunction]
fn rank_bound_dedicated(roi_dim: usize, blocks: Vec<(usize, usize)>) -> PyResult<usize> {
    spectral::rank_bound(roi_dim, &RankLayout::Dedicated(blocks)).map_err(py_err)
}

/// Rank bound for a shared receiver with `snapshots` and per-panel `elements`.
#[pyfunction]
fn rank_bound_shared(roi_dim: usize, snapshots: usize, elements: Vec<usize>) -> PyResult<usize> {
    spectral::rank_bound(roi_dim, &RankLayout::Shared { snapshots, elements }).map_err(py_err)
}

/// `(σ_max, σ_min)` of the two-direction incidence matrix of a linear panel.
#[pyfunction]
fn vandermonde_extreme_singvals(theta: f64, delta: f64, n: usize, spacing: f64, wavelength: f64) -> PyResult<(f64, f64)> {
    let v = spectral::vandermonde_extreme_singvals(theta, delta, n, spacing, wavelength).map_err(py_err)?;
    Ok((v.max, v.min))
}

#[pyfunction]
fn sin_ratio_approx(n: usize, x: f64) -> f64 {
    spectral::sin_ratio_approx(n, x)
}

#[pyfunction]
fn mp_sigma_min_approx(t: usize, n: usize) -> PyResult<f64> {
    spectral::mp_sigma_min_approx(t, n).map_err(py_err)
}

#[pyfunction]
fn mp_density(x: f64, c: f64) -> PyResult<f64> {
    spectral::mp_density(x, c).map_err(py_err)
}

/// Two-source least-squares error bound; angles in radians, SNR linear.
#[pyfunction]
#[pyo3(signature = (theta, delta, elements, spacing, wavelength, snapshots, receiver_distance, snr, tau = 1.0))]
#[allow(clippy::too_many_arguments)]
fn relative_error_bound(
    theta: f64,
    delta: f64,
    elements: usize,
    spacing: f64,
    wavelength: f64,
    snapshots: usize,
    receiver_distance: f64,
    snr: f64,
    tau: f64,
) -> PyResult<f64> {
    spectral::relative_error_bound(&ResolutionQuery {
        theta,
        delta,
        elements,
        spacing,
        wavelength,
        snapshots,
        receiver_distance,
        tau,
        snr,
    })
    .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "risense")]
fn risense_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", risense::VERSION)?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(ls_solve, m)?)?;
    m.add_function(wrap_pyfunction!(rwf_solve, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(field_ssim, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(rank_bound_dedicated, m)?)?;
    m.add_function(wrap_pyfunction!(rank_bound_shared, m)?)?;
    m.add_function(wrap_pyfunction!(vandermonde_extreme_singvals, m)?)?;
    m.add_function(wrap_pyfunction!(sin_ratio_approx, m)?)?;
    m.add_function(wrap_pyfunction!(mp_sigma_min_approx, m)?)?;
    m.add_function(wrap_pyfunction!(mp_density, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error_bound, m)?)?;
    Ok(())
}
