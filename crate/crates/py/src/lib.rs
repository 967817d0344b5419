//! Python bindings for the monogamy toolkit.

use monoqt_core::lab::{self, MonogamyRecord, RunSummary, SweepRecord};
use monoqt_core::measures;
use monoqt_core::states;
use monoqt_core::{Cut, Family, NamedState, OptimizerConfig, Sampler};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(err: monoqt_core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for monoqt_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Pure state on a tensor product of qudits.
#[pyclass(name = "StateVector", module = "monoqt", frozen)]
struct PyStateVector(monoqt_core::StateVector);

#[pymethods]
impl PyStateVector {
    #[new]
    fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        monoqt_core::StateVector::new(dims, amplitudes).py().map(Self)
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn density(&self) -> PyDensityOperator {
        PyDensityOperator(states::density_from_state(&self.0))
    }

    fn __len__(&self) -> usize {
        self.0.amplitudes().len()
    }

    fn __repr__(&self) -> String {
        format!("StateVector(dims={:?})", self.0.dims())
    }
}

/// Density operator on a tensor product of qudits.
#[pyclass(name = "DensityOperator", module = "monoqt", frozen)]
struct PyDensityOperator(monoqt_core::DensityOperator);

#[pymethods]
impl PyDensityOperator {
    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.0.dims().to_vec()
    }

    /// Row-major nested lists of complex entries.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        m.as_slice().chunks(m.cols()).map(<[Complex64]>::to_vec).collect()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn spectrum(&self) -> PyResult<Vec<f64>> {
        self.0.spectrum().py()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        states::partial_trace(&self.0, &keep).py().map(Self)
    }

    fn __repr__(&self) -> String {
        format!("DensityOperator(dims={:?})", self.0.dims())
    }
}

fn optimizer(restarts: usize, iterations: usize, seed: u64) -> PyResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        restarts,
        max_iterations: iterations,
        seed,
        ..OptimizerConfig::default()
    };
    cfg.validate().py()?;
    Ok(cfg)
}

fn record_dict<'py>(py: Python<'py>, r: &MonogamyRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("sample_id", r.sample_id)?;
    d.set_item("n_ab", r.n_ab)?;
    d.set_item("n_ac", r.n_ac)?;
    d.set_item("n_a_bc", r.n_a_bc)?;
    d.set_item("lhs", r.lhs)?;
    d.set_item("residual", r.residual)?;
    d.set_item("sampler", r.sampler.to_string())?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

fn sweep_dict<'py>(py: Python<'py>, r: &SweepRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("p", r.p)?;
    d.set_item("analytic_residual", r.analytic_residual)?;
    d.set_item("numeric_residual", r.numeric_residual)?;
    d.set_item("branch", r.branch.to_string())?;
    Ok(d)
}

fn summary_dict<'py>(py: Python<'py>, s: &RunSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", s.n)?;
    d.set_item("min_residual", s.min_residual)?;
    d.set_item("violations", s.violations)?;
    d.set_item("sampler", s.sampler.to_string())?;
    d.set_item("base_seed", s.base_seed)?;
    Ok(d)
}

/// Builds `Ou`, `KS`, `Ou_p`, `KS_p`, `GHZ3`, `Product` or `MaxEnt(d)`.
#[pyfunction]
#[pyo3(signature = (name, p=None))]
fn named_state(name: &str, p: Option<f64>) -> PyResult<PyStateVector> {
    let state: NamedState = name.parse().py()?;
    states::named_state(state, p).py().map(PyStateVector)
}

#[pyfunction]
fn haar_random_state(dims: Vec<usize>, seed: u64) -> PyResult<PyStateVector> {
    states::haar_random_state(&dims, seed).py().map(PyStateVector)
}

#[pyfunction]
fn canonical_qutrit_sample(seed: u64) -> PyResult<PyStateVector> {
    states::canonical_qutrit_sample(seed).py().map(PyStateVector)
}

#[pyfunction]
fn random_mixed(dims: Vec<usize>, rank: usize, seed: u64) -> PyResult<PyDensityOperator> {
    states::random_mixed(&dims, rank, seed).py().map(PyDensityOperator)
}

/// Negativity across the cut separating `left` (0-based subsystems) from the rest.
#[pyfunction]
#[pyo3(signature = (rho, left=vec![0]))]
fn negativity(rho: &PyDensityOperator, left: Vec<usize>) -> PyResult<f64> {
    let cut = Cut::new(&left, rho.0.num_subsystems()).py()?;
    Ok(measures::negativity(&rho.0, &cut).py()?.value)
}

#[pyfunction]
#[pyo3(signature = (rho, restarts=8, iterations=500, seed=0))]
fn fully_entangled_fraction(rho: &PyDensityOperator, restarts: usize, iterations: usize, seed: u64) -> PyResult<f64> {
    let cfg = optimizer(restarts, iterations, seed)?;
    Ok(measures::fully_entangled_fraction(&rho.0, &cfg).py()?.value)
}

#[pyfunction]
#[pyo3(signature = (rho, restarts=8, iterations=500, seed=0))]
fn teleportation_capability(rho: &PyDensityOperator, restarts: usize, iterations: usize, seed: u64) -> PyResult<f64> {
    let cfg = optimizer(restarts, iterations, seed)?;
    Ok(measures::teleportation_capability(&rho.0, &cfg).py()?.value)
}

#[pyfunction]
#[pyo3(signature = (psi, focus=0))]
fn negativity_residual<'py>(py: Python<'py>, psi: &PyStateVector, focus: usize) -> PyResult<Bound<'py, PyDict>> {
    record_dict(py, &lab::negativity_residual(&psi.0, focus).py()?)
}

#[pyfunction]
#[pyo3(signature = (psi, focus=0, restarts=8, iterations=500, seed=0))]
fn capability_residual<'py>(
    py: Python<'py>,
    psi: &PyStateVector,
    focus: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = optimizer(restarts, iterations, seed)?;
    record_dict(py, &lab::capability_residual(&psi.0, focus, &cfg).py()?)
}

#[pyfunction]
fn analytic_oup_residual<'py>(py: Python<'py>, p: f64) -> PyResult<Bound<'py, PyDict>> {
    sweep_dict(py, &lab::analytic_oup_residual(p).py()?)
}

#[pyfunction]
fn analytic_ksp_residual<'py>(py: Python<'py>, p: f64) -> PyResult<Bound<'py, PyDict>> {
    sweep_dict(py, &lab::analytic_ksp_residual(p).py()?)
}

#[pyfunction]
fn p_grid(points: usize) -> PyResult<Vec<f64>> {
    lab::p_grid(points).py()
}

#[pyfunction]
fn sweep<'py>(py: Python<'py>, family: &str, points: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let family: Family = family.parse().py()?;
    let records = py.detach(|| lab::sweep(family, points)).py()?;
    records.iter().map(|r| sweep_dict(py, r)).collect()
}

/// Returns `(records, summary)` for `n` random three-qutrit states.
#[pyfunction]
#[pyo3(signature = (n, sampler="haar", seed=0))]
fn run_monte_carlo<'py>(
    py: Python<'py>,
    n: usize,
    sampler: &str,
    seed: u64,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Bound<'py, PyDict>)> {
    let sampler: Sampler = sampler.parse().py()?;
    let run = py.detach(|| lab::run_monte_carlo(n, sampler, seed)).py()?;
    let records = run
        .records
        .iter()
        .map(|r| record_dict(py, r))
        .collect::<PyResult<_>>()?;
    Ok((records, summary_dict(py, &run.summary)?))
}

#[pymodule]
fn monoqt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyDensityOperator>()?;
    m.add_function(wrap_pyfunction!(named_state, m)?)?;
    m.add_function(wrap_pyfunction!(haar_random_state, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_qutrit_sample, m)?)?;
    m.add_function(wrap_pyfunction!(random_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(negativity, m)?)?;
    m.add_function(wrap_pyfunction!(fully_entangled_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(teleportation_capability, m)?)?;
    m.add_function(wrap_pyfunction!(negativity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(capability_residual, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_oup_residual, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_ksp_residual, m)?)?;
    m.add_function(wrap_pyfunction!(p_grid, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_monte_carlo, m)?)?;
    m.add("OU_BRANCH_POINT", lab::OU_BRANCH_POINT)?;
    Ok(())
}
