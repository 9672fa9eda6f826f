//! Python bindings for the `qcpmd` crate.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qcpmd::dynamics::{self, Dissipation, Estimator, MDState};
use qcpmd::hamiltonian::{self, DEFAULT_FD_STEP};
use qcpmd::runner::{self, output, Preset, RunConfig};
use qcpmd::statevector::{self, AnsatzLayout};
use qcpmd::{pauli, rng, shadow, vqe};

fn err(e: qcpmd::Error) -> PyErr {
    match e {
        qcpmd::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "PauliWord", module = "qcpmd_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPauliWord(pauli::PauliWord);

#[pymethods]
impl PyPauliWord {
    /// Label with qubit 0 rightmost, e.g. "IXYZ".
    #[new]
    fn new(label: &str) -> PyResult<Self> {
        label.parse().map(Self).map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.0.weight()
    }

    fn label(&self) -> String {
        self.0.label()
    }

    fn __str__(&self) -> String {
        self.0.label()
    }

    fn __repr__(&self) -> String {
        format!("PauliWord('{}')", self.0.label())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "Observable", module = "qcpmd_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyObservable(pauli::Observable);

#[pymethods]
impl PyObservable {
    /// `terms` is a list of `(coefficient, label)` pairs.
    #[new]
    fn new(num_qubits: usize, terms: Vec<(f64, String)>) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(c, l)| l.parse().map(|w| (c, w)))
            .collect::<qcpmd::Result<Vec<_>>>()
            .map_err(err)?;
        pauli::Observable::new(num_qubits, terms).map(Self).map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn terms(&self) -> Vec<(f64, String)> {
        self.0.terms().iter().map(|(c, w)| (*c, w.label())).collect()
    }

    /// Number of non-identity terms.
    fn measured_terms(&self) -> usize {
        self.0.measured_terms()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Observable({} qubits, {} terms)", self.0.num_qubits(), self.0.len())
    }
}

#[pyclass(name = "StateVector", module = "qcpmd_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStateVector(statevector::StateVector);

#[pymethods]
impl PyStateVector {
    /// Amplitudes indexed little-endian: bit q of the index is qubit q.
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        statevector::StateVector::from_amplitudes(amplitudes)
            .map(Self)
            .map_err(err)
    }

    /// Computational basis state from a bitstring such as "0011".
    #[staticmethod]
    fn basis(bitstring: &str) -> PyResult<Self> {
        let (n, idx) = statevector::parse_bitstring(bitstring).map_err(err)?;
        statevector::StateVector::basis(n, idx).map(Self).map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.0.probabilities()
    }

    /// Bitstrings drawn from the computational-basis distribution.
    #[pyo3(signature = (count, seed=0))]
    fn sample(&self, count: usize, seed: u64) -> Vec<String> {
        let mut rng = rng::stream(seed, &[]);
        statevector::sample_bitstrings(&self.0, count, &mut rng)
            .into_iter()
            .map(|i| statevector::format_bitstring(self.0.num_qubits(), i))
            .collect()
    }
}

#[pyclass(name = "AnsatzConfig", module = "qcpmd_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAnsatzConfig(statevector::AnsatzConfig);

#[pymethods]
impl PyAnsatzConfig {
    #[new]
    #[pyo3(signature = (depth=4, occupation="0011", layout="real-layered"))]
    fn new(depth: usize, occupation: &str, layout: &str) -> PyResult<Self> {
        let mut cfg = statevector::AnsatzConfig::new(depth, occupation).map_err(err)?;
        cfg.layout = layout.parse::<AnsatzLayout>().map_err(err)?;
        Ok(Self(cfg))
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth
    }

    #[getter]
    fn occupation(&self) -> String {
        self.0.occupation_label()
    }

    fn parameter_count(&self) -> usize {
        self.0.parameter_count()
    }

    fn prepare(&self, params: Vec<f64>) -> PyResult<PyStateVector> {
        statevector::prepare_ansatz_state(&self.0, &params)
            .map(PyStateVector)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "AnsatzConfig(depth={}, occupation='{}', layout='{}')",
            self.0.depth,
            self.0.occupation_label(),
            self.0.layout
        )
    }
}

#[pyclass(name = "HamiltonianTable", module = "qcpmd_py", frozen, skip_from_py_object)]
struct PyHamiltonianTable(hamiltonian::HamiltonianTable);

#[pymethods]
impl PyHamiltonianTable {
    /// Loads a CSV table; with no path, the built-in H2 / STO-3G table.
    #[new]
    #[pyo3(signature = (path=None))]
    fn new(path: Option<PathBuf>) -> PyResult<Self> {
        match path {
            Some(p) => hamiltonian::HamiltonianTable::load(p).map(Self).map_err(err),
            None => Ok(Self(hamiltonian::HamiltonianTable::h2_sto3g())),
        }
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn words(&self) -> Vec<String> {
        self.0.words().iter().map(|w| w.label()).collect()
    }

    fn grid(&self) -> Vec<f64> {
        self.0.grid().to_vec()
    }

    fn range(&self) -> (f64, f64) {
        self.0.range()
    }

    fn hamiltonian_at(&self, r: f64) -> PyResult<PyObservable> {
        self.0.hamiltonian_at(r).map(PyObservable).map_err(err)
    }

    #[pyo3(signature = (r, d=DEFAULT_FD_STEP))]
    fn force_observable(&self, r: f64, d: f64) -> PyResult<PyObservable> {
        self.0.force_observable(r, d).map(PyObservable).map_err(err)
    }
}

fn estimator(name: &str, n_snapshots: usize, n_groups: usize, n_shots: usize) -> PyResult<Estimator> {
    match name {
        "shadows" => Ok(Estimator::Shadows {
            snapshots: n_snapshots,
            groups: n_groups,
        }),
        "direct" => Ok(Estimator::Direct { shots: n_shots }),
        "exact" => Ok(Estimator::Exact),
        _ => Err(PyValueError::new_err(format!("unknown estimator {name:?}"))),
    }
}

#[pyclass(name = "DynamicsConfig", module = "qcpmd_py", skip_from_py_object)]
#[derive(Clone)]
struct PyDynamicsConfig(dynamics::DynamicsConfig);

#[pymethods]
impl PyDynamicsConfig {
    /// Defaults are the reference experiment's settings. `adaptive_window`
    /// switches from fixed `gamma`/`zeta` to variance-driven dissipation.
    #[new]
    #[pyo3(signature = (
        *, dt=None, mass=None, mu=None, temperature=None, estimator="shadows",
        n_snapshots=51, n_groups=3, n_shots=51, gamma=0.8, zeta=0.8,
        adaptive_window=None, scheme="symplectic", fd_step=None,
        total_time=None, burn_in=None, seed=0, ansatz=None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        dt: Option<f64>,
        mass: Option<f64>,
        mu: Option<f64>,
        temperature: Option<f64>,
        estimator: &str,
        n_snapshots: usize,
        n_groups: usize,
        n_shots: usize,
        gamma: f64,
        zeta: f64,
        adaptive_window: Option<usize>,
        scheme: &str,
        fd_step: Option<f64>,
        total_time: Option<f64>,
        burn_in: Option<f64>,
        seed: u64,
        ansatz: Option<PyRef<'_, PyAnsatzConfig>>,
    ) -> PyResult<Self> {
        let mut c = dynamics::DynamicsConfig::default();
        c.dt = dt.unwrap_or(c.dt);
        c.mass = mass.unwrap_or(c.mass);
        c.mu = mu.unwrap_or(c.mu);
        c.temperature = temperature.unwrap_or(c.temperature);
        c.estimator = self::estimator(estimator, n_snapshots, n_groups, n_shots)?;
        c.dissipation = match adaptive_window {
            Some(window) => Dissipation::Adaptive { window },
            None => Dissipation::Fixed { gamma, zeta },
        };
        c.scheme = scheme.parse().map_err(err)?;
        c.fd_step = fd_step.unwrap_or(c.fd_step);
        c.total_time = total_time.unwrap_or(c.total_time);
        c.burn_in = burn_in.unwrap_or(c.burn_in);
        c.seed = seed;
        if let Some(a) = ansatz {
            c.ansatz = a.0.clone();
        }
        c.validate().map_err(err)?;
        Ok(Self(c))
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.0.dt
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn estimator(&self) -> &'static str {
        self.0.estimator.name()
    }

    #[getter]
    fn total_time(&self) -> f64 {
        self.0.total_time
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    fn steps(&self) -> usize {
        self.0.steps()
    }

    fn ansatz(&self) -> PyAnsatzConfig {
        PyAnsatzConfig(self.0.ansatz.clone())
    }
}

#[pyfunction]
fn expectation_exact(state: &PyStateVector, observable: &PyObservable) -> PyResult<f64> {
    pauli::expectation_exact(&state.0, &observable.0).map_err(err)
}

#[pyfunction]
fn pauli_expectation(state: &PyStateVector, word: &PyPauliWord) -> PyResult<f64> {
    pauli::pauli_expectation(&state.0, &word.0).map_err(err)
}

/// Lowest eigenvalue by dense diagonalization.
#[pyfunction]
fn ground_state_energy(observable: &PyObservable) -> PyResult<f64> {
    pauli::ground_state_exact(&observable.0).map(|(e, _)| e).map_err(err)
}

/// Median-of-means estimate of `observable` from one batch of random-basis snapshots.
#[pyfunction]
#[pyo3(signature = (state, observable, n_snapshots=51, n_groups=3, seed=0))]
fn shadow_estimate(
    state: &PyStateVector,
    observable: &PyObservable,
    n_snapshots: usize,
    n_groups: usize,
    seed: u64,
) -> PyResult<f64> {
    let mut rng = rng::stream(seed, &[]);
    let batch = shadow::collect_snapshots(&state.0, n_snapshots, n_groups, &mut rng).map_err(err)?;
    shadow::estimate_observable(&batch, &observable.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, word, shots=51, seed=0))]
fn direct_estimate(state: &PyStateVector, word: &PyPauliWord, shots: usize, seed: u64) -> PyResult<f64> {
    let mut rng = rng::stream(seed, &[]);
    shadow::direct_pauli_estimate(&state.0, &word.0, shots, &mut rng).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (table, r, ansatz, theta_init, tol=1e-5))]
fn vqe_optimize<'py>(
    py: Python<'py>,
    table: &PyHamiltonianTable,
    r: f64,
    ansatz: &PyAnsatzConfig,
    theta_init: Vec<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let res = py
        .detach(|| vqe::vqe_optimize(&table.0, r, &ansatz.0, &theta_init, tol))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("theta", res.theta)?;
    d.set_item("energy", res.energy)?;
    d.set_item("ground_energy", res.ground_energy)?;
    d.set_item("gradient_norm", res.gradient_norm)?;
    d.set_item("iterations", res.iterations)?;
    Ok(d)
}

/// Integrates from rest at bond length `r` with parameters `theta`. Returns
/// the summary plus one list per trajectory column.
#[pyfunction]
fn run_trajectory<'py>(
    py: Python<'py>,
    config: &PyDynamicsConfig,
    table: &PyHamiltonianTable,
    r: f64,
    theta: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.0.clone();
    let traj = py
        .detach(|| dynamics::run_trajectory(&cfg, MDState::at_rest(r, theta), &table.0))
        .map_err(err)?;
    let recs = &traj.records;
    let d = PyDict::new(py);
    d.set_item("step", recs.iter().map(|x| x.step).collect::<Vec<_>>())?;
    d.set_item("time_fs", recs.iter().map(|x| x.time_fs).collect::<Vec<_>>())?;
    d.set_item("r", recs.iter().map(|x| x.r).collect::<Vec<_>>())?;
    d.set_item("v", recs.iter().map(|x| x.v).collect::<Vec<_>>())?;
    d.set_item("force", recs.iter().map(|x| x.force).collect::<Vec<_>>())?;
    d.set_item("energy", recs.iter().map(|x| x.energy).collect::<Vec<_>>())?;
    d.set_item("preparations", recs.iter().map(|x| x.preparations).collect::<Vec<_>>())?;
    let s = &traj.summary;
    d.set_item("mean_r", s.mean_r)?;
    d.set_item("std_r", s.std_r)?;
    d.set_item("total_preparations", s.preparations)?;
    d.set_item("aborted", s.aborted)?;
    d.set_item("abort_reason", s.abort_reason.clone())?;
    Ok(d)
}

/// Closed-form preparations per step.
#[pyfunction]
#[pyo3(signature = (estimator, n_coordinates, n_params, n_terms, n_snapshots=51, n_groups=3, n_shots=51))]
fn sample_budget<'py>(
    py: Python<'py>,
    estimator: &str,
    n_coordinates: usize,
    n_params: usize,
    n_terms: usize,
    n_snapshots: usize,
    n_groups: usize,
    n_shots: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let e = self::estimator(estimator, n_snapshots, n_groups, n_shots)?;
    let b = dynamics::sample_budget(&e, n_coordinates, n_params, n_terms);
    let d = PyDict::new(py);
    d.set_item("nuclear_per_step", b.nuclear_per_step)?;
    d.set_item("parameter_per_step", b.parameter_per_step)?;
    d.set_item("per_step", b.per_step())?;
    Ok(d)
}

/// Runs a CLI preset and returns its summary as a dict.
#[pyfunction]
#[pyo3(signature = (preset, out, config=None, seed=None))]
fn run_preset<'py>(
    py: Python<'py>,
    preset: &str,
    out: PathBuf,
    config: Option<PathBuf>,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let preset: Preset = preset.parse().map_err(err)?;
    let mut cfg = match config {
        Some(path) => RunConfig::load(preset, path).map_err(err)?,
        None => RunConfig::preset(preset),
    };
    cfg.output_dir = out;
    if let Some(s) = seed {
        cfg.dynamics.seed = s;
    }
    let text = py
        .detach(|| runner::run_preset(&cfg).and_then(|o| output::json(&o.summary)))
        .map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pymodule]
fn qcpmd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauliWord>()?;
    m.add_class::<PyObservable>()?;
    m.add_class::<PyStateVector>()?;
    m.add_class::<PyAnsatzConfig>()?;
    m.add_class::<PyHamiltonianTable>()?;
    m.add_class::<PyDynamicsConfig>()?;
    m.add_function(wrap_pyfunction!(expectation_exact, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state_energy, m)?)?;
    m.add_function(wrap_pyfunction!(shadow_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(direct_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(vqe_optimize, m)?)?;
    m.add_function(wrap_pyfunction!(run_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(sample_budget, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    Ok(())
}
