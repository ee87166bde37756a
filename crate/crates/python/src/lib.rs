//! Python bindings: Hamiltonian loading, Pauli sums, exact diagonalization and
//! VQE / ADAPT-VQE runs.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vqebench::adapt::{run_adapt as core_adapt, run_vqe as core_vqe, AdaptConfig, RunOutcome};
use vqebench::{build_uccsd_pool, parse_fcidump, read_fcidump, solve_fci as core_fci, OptimizerKind};

fn to_py(e: vqebench::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Molecular Hamiltonian in a spatial-orbital basis.
#[pyclass(name = "Hamiltonian", frozen)]
struct PyHamiltonian {
    inner: vqebench::MolecularHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    #[staticmethod]
    fn from_fcidump(path: &str) -> PyResult<Self> {
        Ok(Self { inner: read_fcidump(path).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_fcidump_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_fcidump(text).map_err(to_py)? })
    }

    #[getter]
    fn label(&self) -> &str {
        &self.inner.label
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    #[getter]
    fn n_electrons(&self) -> usize {
        self.inner.n_electrons()
    }

    #[getter]
    fn core_energy(&self) -> f64 {
        self.inner.core_energy()
    }

    /// Jordan-Wigner image without the core energy.
    fn qubit_hamiltonian(&self) -> PyResult<PyPauliSum> {
        Ok(PyPauliSum { inner: self.inner.qubit_hamiltonian().map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "Hamiltonian(label={:?}, n_qubits={}, n_electrons={})",
            self.inner.label,
            self.inner.n_qubits(),
            self.inner.n_electrons()
        )
    }
}

#[pyclass(name = "PauliSum", frozen)]
struct PyPauliSum {
    inner: vqebench::PauliSum,
}

#[pymethods]
impl PyPauliSum {
    /// Builds a sum from `(label, coefficient)` pairs, labels like "X0 Z2".
    #[new]
    fn new(n_qubits: usize, terms: Vec<(String, Complex64)>) -> PyResult<Self> {
        let items: Vec<(&str, Complex64)> = terms.iter().map(|(l, c)| (l.as_str(), *c)).collect();
        Ok(Self { inner: vqebench::PauliSum::from_labels(n_qubits, &items).map_err(to_py)? })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn terms(&self) -> Vec<(String, Complex64)> {
        self.inner.terms().map(|t| (t.label(), t.coeff())).collect()
    }

    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __add__(&self, other: &PyPauliSum) -> PyResult<PyPauliSum> {
        Ok(PyPauliSum { inner: self.inner.add(&other.inner).map_err(to_py)? })
    }

    fn __mul__(&self, other: &PyPauliSum) -> PyResult<PyPauliSum> {
        Ok(PyPauliSum { inner: self.inner.multiply(&other.inner).map_err(to_py)? })
    }

    fn commutator(&self, other: &PyPauliSum) -> PyResult<PyPauliSum> {
        Ok(PyPauliSum { inner: self.inner.commutator(&other.inner).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        self.inner.to_string()
    }
}

fn optimizer_from(name: &str) -> PyResult<OptimizerKind> {
    name.parse().map_err(to_py)
}

fn config(optimizer: &str, grad_norm_threshold: Option<f64>, max_iterations: Option<usize>) -> PyResult<AdaptConfig> {
    let mut cfg = AdaptConfig::default().with_optimizer(optimizer_from(optimizer)?);
    if let Some(t) = grad_norm_threshold {
        cfg.grad_norm_threshold = t;
    }
    if let Some(m) = max_iterations {
        cfg.max_iterations = m;
    }
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn outcome_dict<'py>(py: Python<'py>, out: &RunOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("method", out.method.as_str())?;
    d.set_item("optimizer", out.optimizer.as_str())?;
    d.set_item("energy", out.energy)?;
    d.set_item("converged", out.converged)?;
    d.set_item("final_grad_norm", out.final_grad_norm)?;
    d.set_item("operators", out.ansatz.elements().iter().map(|e| e.pool_id).collect::<Vec<_>>())?;
    d.set_item("thetas", out.ansatz.thetas())?;
    d.set_item("measurements", out.ledger.total())?;
    d.set_item("gate_count", out.resources.gate_count)?;
    d.set_item("depth", out.resources.depth)?;
    d.set_item("state", out.state.amplitudes().to_vec())?;
    let trace: Vec<(usize, f64, f64, u64)> = out
        .trace
        .iterations
        .iter()
        .map(|it| (it.selected_pool_id, it.grad_norm, it.energy, it.measurement_count_cumulative))
        .collect();
    d.set_item("trace", trace)?;
    Ok(d)
}

/// Exact ground state in the fixed-particle-number sector.
#[pyfunction]
fn solve_fci<'py>(py: Python<'py>, ham: &PyHamiltonian) -> PyResult<Bound<'py, PyDict>> {
    let sol = core_fci(&ham.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("energy", sol.energy)?;
    d.set_item("degenerate", sol.degeneracy_flag)?;
    d.set_item("low_spectrum", sol.low_spectrum.clone())?;
    d.set_item("state", sol.ground_state.amplitudes().to_vec())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (ham, optimizer = "lbfgs"))]
fn run_vqe<'py>(py: Python<'py>, ham: &PyHamiltonian, optimizer: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(optimizer, None, None)?;
    let out = core_vqe(&ham.inner, &cfg).map_err(to_py)?;
    outcome_dict(py, &out)
}

#[pyfunction]
#[pyo3(signature = (ham, optimizer = "lbfgs", grad_norm_threshold = None, max_iterations = None))]
fn run_adapt<'py>(
    py: Python<'py>,
    ham: &PyHamiltonian,
    optimizer: &str,
    grad_norm_threshold: Option<f64>,
    max_iterations: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(optimizer, grad_norm_threshold, max_iterations)?;
    let out = core_adapt(&ham.inner, &cfg).map_err(to_py)?;
    outcome_dict(py, &out)
}

/// Descriptions of the spin-adapted singles and doubles pool.
#[pyfunction]
fn uccsd_pool(n_spatial: usize, n_electrons: usize) -> PyResult<Vec<String>> {
    let pool = build_uccsd_pool(n_spatial, n_electrons).map_err(to_py)?;
    Ok(pool.operators().iter().map(|o| o.description.clone()).collect())
}

#[pyfunction]
fn verify_car(n_modes: usize) -> bool {
    vqebench::verify_car(n_modes)
}

#[pymodule]
fn vqebench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyPauliSum>()?;
    m.add_function(wrap_pyfunction!(solve_fci, m)?)?;
    m.add_function(wrap_pyfunction!(run_vqe, m)?)?;
    m.add_function(wrap_pyfunction!(run_adapt, m)?)?;
    m.add_function(wrap_pyfunction!(uccsd_pool, m)?)?;
    m.add_function(wrap_pyfunction!(verify_car, m)?)?;
    Ok(())
}
