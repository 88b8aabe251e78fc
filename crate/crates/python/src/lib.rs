//! Python bindings for `qdistcomp`.
//!
//! ```python
//! import qdistcomp_py as q
//! s = q.State.from_spec("{family: ghz, labels: [A1, A2, R], dims: [2, 2, 2], reference: R}")
//! r = q.Region(s, "R")
//! r.constants()        # {'A1': 0.5, 'A2': 0.5, 'A1+A2': 1.5}
//! r.greedy([1.0, 2.0]) # ([1.0, 0.5], 2.0, ['A1', 'A2'])
//! ```

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qdistcomp::cli::{export_h_representation, parse_h_representation, parse_state_spec};
use qdistcomp::esq::{self, EsqBudget};
use qdistcomp::linalg::{CMatrix, CVector};
use qdistcomp::qstate::{self, build_family, build_state, Family};
use qdistcomp::region::{self, sorted_subsets, RatePoint, RegionConstants, SenderPermutation, DEDUP_TOL, FEASIBILITY_TOL};
use qdistcomp::sim::{self, DecouplingConfig};
use qdistcomp::{Error, MultipartyState, SubsetMask};

fn py_err(e: Error) -> PyErr {
    if e.is_internal() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for qdistcomp::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A density operator on labelled subsystems.
#[pyclass(frozen, name = "State")]
struct PyState {
    inner: MultipartyState,
    reference: Option<String>,
}

impl PyState {
    fn mask(&self, labels: &[String]) -> PyResult<SubsetMask> {
        self.inner.mask(labels).py()
    }

    fn masks(&self, parts: &[Vec<String>]) -> PyResult<Vec<SubsetMask>> {
        parts.iter().map(|p| self.mask(p)).collect()
    }

    fn family(labels: Vec<String>, dims: Vec<usize>, family: Family) -> PyResult<Self> {
        Ok(PyState { inner: build_family(&labels, &dims, &family).py()?, reference: None })
    }
}

#[pymethods]
impl PyState {
    /// Parse a state file (YAML mapping, e.g. `{family: ghz, labels: [A, R], dims: [2, 2], reference: R}`).
    #[staticmethod]
    fn from_spec(text: &str) -> PyResult<Self> {
        let spec = parse_state_spec(text).py()?;
        Ok(PyState { inner: build_state(&spec).py()?, reference: Some(spec.reference) })
    }

    #[staticmethod]
    fn ghz(labels: Vec<String>, dims: Vec<usize>) -> PyResult<Self> {
        Self::family(labels, dims, Family::Ghz)
    }

    #[staticmethod]
    fn w(labels: Vec<String>, dims: Vec<usize>) -> PyResult<Self> {
        Self::family(labels, dims, Family::W)
    }

    #[staticmethod]
    fn product(labels: Vec<String>, dims: Vec<usize>, basis: Vec<usize>) -> PyResult<Self> {
        Self::family(labels, dims, Family::Product { basis })
    }

    #[staticmethod]
    fn bell(labels: Vec<String>, dims: Vec<usize>, pairs: Vec<(String, String)>) -> PyResult<Self> {
        Self::family(labels, dims, Family::Bell { pairs })
    }

    #[staticmethod]
    #[pyo3(signature = (labels, dims, seed=0))]
    fn random_pure(labels: Vec<String>, dims: Vec<usize>, seed: u64) -> PyResult<Self> {
        Self::family(labels, dims, Family::RandomPure { seed })
    }

    /// Separable mixture: `branches` is a list of `(weight, [factor per label])` with each factor
    /// a list of complex amplitudes.
    #[staticmethod]
    fn mixture(
        labels: Vec<String>,
        dims: Vec<usize>,
        branches: Vec<(f64, Vec<Vec<num_complex::Complex64>>)>,
    ) -> PyResult<Self> {
        let branches = branches
            .into_iter()
            .map(|(w, fs)| (w, fs.into_iter().map(CVector::from_vec).collect()))
            .collect();
        Self::family(labels, dims, Family::Mixture { branches })
    }

    /// State from a density matrix given as nested lists of complex numbers.
    #[staticmethod]
    fn from_density(labels: Vec<String>, dims: Vec<usize>, rows: Vec<Vec<num_complex::Complex64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("density matrix must be square"));
        }
        let op = CMatrix::from_fn(n, n, |r, c| rows[r][c]);
        Ok(PyState { inner: MultipartyState::new(labels, dims, op).py()?, reference: None })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    /// Reference label named by the state file, if any.
    #[getter]
    fn reference(&self) -> Option<String> {
        self.reference.clone()
    }

    fn density_matrix(&self) -> Vec<Vec<num_complex::Complex64>> {
        let op = self.inner.op();
        (0..op.nrows()).map(|r| (0..op.ncols()).map(|c| op[(r, c)]).collect()).collect()
    }

    fn entropy(&self, labels: Vec<String>) -> PyResult<f64> {
        self.inner.entropy(self.mask(&labels)?).py()
    }

    fn mutual_info(&self, a: Vec<String>, b: Vec<String>) -> PyResult<f64> {
        self.inner.mutual_info(self.mask(&a)?, self.mask(&b)?).py()
    }

    #[pyo3(signature = (parts, cond=None))]
    fn multiparty_info(&self, parts: Vec<Vec<String>>, cond: Option<Vec<String>>) -> PyResult<f64> {
        let cond = cond.map(|c| self.mask(&c)).transpose()?;
        self.inner.multiparty_info(&self.masks(&parts)?, cond).py()
    }

    fn reduced(&self, labels: Vec<String>) -> PyResult<Self> {
        let inner = self.inner.reduced_state(self.mask(&labels)?).py()?;
        let reference = self.reference.clone().filter(|r| labels.contains(r));
        Ok(PyState { inner, reference })
    }

    fn purify(&self, new_label: &str) -> PyResult<Self> {
        Ok(PyState { inner: self.inner.purify(new_label).py()?, reference: self.reference.clone() })
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    #[pyo3(signature = (tol=1e-9))]
    fn is_pure(&self, tol: f64) -> bool {
        self.inner.is_pure(tol)
    }

    fn fidelity(&self, other: &PyState) -> PyResult<f64> {
        qstate::fidelity(&self.inner, &other.inner).py()
    }

    /// `Tr|ρ − σ|`; pass `normalized=True` for `½ Tr|ρ − σ|`.
    #[pyo3(signature = (other, normalized=false))]
    fn trace_distance(&self, other: &PyState, normalized: bool) -> PyResult<f64> {
        if normalized {
            qstate::normalized_trace_distance(&self.inner, &other.inner).py()
        } else {
            qstate::trace_norm_distance(&self.inner, &other.inner).py()
        }
    }

    fn __repr__(&self) -> String {
        format!("State(labels={:?}, dims={:?})", self.inner.labels(), self.inner.dims())
    }
}

/// The inner-bound rate region of a state with respect to a reference system.
#[pyclass(frozen, name = "Region")]
struct PyRegion {
    rc: RegionConstants,
}

impl PyRegion {
    fn point(&self, rates: Vec<f64>) -> PyResult<RatePoint> {
        if rates.len() != self.rc.num_senders() {
            return Err(PyValueError::new_err(format!(
                "{} rates for {} senders",
                rates.len(),
                self.rc.num_senders()
            )));
        }
        Ok(RatePoint(rates))
    }
}

#[pymethods]
impl PyRegion {
    #[new]
    #[pyo3(signature = (state, reference=None))]
    fn new(state: &PyState, reference: Option<String>) -> PyResult<Self> {
        let reference = reference
            .or_else(|| state.reference.clone())
            .ok_or_else(|| PyValueError::new_err("no reference label given"))?;
        Ok(PyRegion { rc: region::region_constants(&state.inner, &reference).py()? })
    }

    /// Region from explicit constants keyed by `+`-joined sender labels.
    #[staticmethod]
    fn from_constants(senders: Vec<String>, reference: String, constants: BTreeMap<String, f64>) -> PyResult<Self> {
        let placeholder = RegionConstants::new(senders.clone(), reference.clone(), vec![0.0; 1 << senders.len()]).py()?;
        let mut values = vec![0.0; 1 << senders.len()];
        for (key, v) in &constants {
            values[placeholder.parse_key_label(key).py()?] = *v;
        }
        Ok(PyRegion { rc: RegionConstants::new(senders, reference, values).py()? })
    }

    /// Parse a halfspace description; sender labels are not stored in the format.
    #[staticmethod]
    fn from_h_representation(text: &str, senders: Vec<String>, reference: String) -> PyResult<Self> {
        Ok(PyRegion { rc: parse_h_representation(text, senders, reference).py()? })
    }

    #[getter]
    fn senders(&self) -> Vec<String> {
        self.rc.senders().to_vec()
    }

    #[getter]
    fn reference(&self) -> String {
        self.rc.reference().to_string()
    }

    fn constants(&self) -> BTreeMap<String, f64> {
        sorted_subsets(self.rc.num_senders()).into_iter().map(|k| (self.rc.key_label(k), self.rc.get(k))).collect()
    }

    fn is_supermodular(&self) -> bool {
        self.rc.check_supermodular(FEASIBILITY_TOL).passed()
    }

    /// `"inside"`, `"boundary"` or `"outside"`.
    #[pyo3(signature = (rates, tol=1e-7))]
    fn membership(&self, rates: Vec<f64>, tol: f64) -> PyResult<String> {
        Ok(self.rc.membership(&self.point(rates)?, tol).py()?.verdict.to_string())
    }

    /// Corner point of a sender order, given as labels.
    fn corner_point(&self, order: Vec<String>) -> PyResult<Vec<f64>> {
        let pi = SenderPermutation::from_labels(self.rc.senders(), &order).py()?;
        Ok(region::corner_point(&self.rc, &pi).py()?.0)
    }

    /// Distinct corner points with the lexicographically first order producing each.
    fn corner_set(&self) -> Vec<(Vec<f64>, Vec<String>)> {
        region::corner_set(&self.rc, DEDUP_TOL)
            .vertices
            .into_iter()
            .map(|v| {
                let w = v.witness.expect("corner vertices carry witnesses");
                (v.point.0, w.labels(self.rc.senders()).into_iter().map(str::to_string).collect())
            })
            .collect()
    }

    /// Vertices by brute force over tight constraint systems (at most 5 senders).
    fn vertices(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(region::enumerate_vertices(&self.rc).py()?.vertices.into_iter().map(|v| v.point.0).collect())
    }

    /// Minimum of `Σ c_i Q_i`: `(rates, value, sender order)`.
    fn greedy(&self, costs: Vec<f64>) -> PyResult<(Vec<f64>, f64, Vec<String>)> {
        let g = region::greedy_minimize(&self.rc, &costs).py()?;
        let order = g.permutation.labels(self.rc.senders()).into_iter().map(str::to_string).collect();
        Ok((g.point.0, g.value, order))
    }

    fn h_representation(&self) -> String {
        export_h_representation(&self.rc)
    }

    fn __repr__(&self) -> String {
        format!("Region(senders={:?}, reference={:?})", self.rc.senders(), self.rc.reference())
    }
}

#[pyclass(frozen, get_all, name = "EsqEstimate")]
struct PyEsqEstimate {
    value: f64,
    baseline: f64,
    extension: String,
    d_e: usize,
    d_g: usize,
}

#[pymethods]
impl PyEsqEstimate {
    fn __repr__(&self) -> String {
        format!(
            "EsqEstimate(value={}, baseline={}, extension={:?}, d_e={})",
            self.value, self.baseline, self.extension, self.d_e
        )
    }
}

fn budget(d_e_max: usize, restarts: usize, iterations: usize, seed: u64) -> EsqBudget {
    EsqBudget { d_e_sweep: (1..=d_e_max).collect(), restarts, iterations, seed }
}

/// Upper bound on the squashed entanglement between `parts` (lists of labels).
#[pyfunction]
#[pyo3(signature = (state, parts, d_e_max=4, restarts=4, iterations=200, seed=0))]
fn esq_upper_bound(
    state: &PyState,
    parts: Vec<Vec<String>>,
    d_e_max: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> PyResult<PyEsqEstimate> {
    let masks = state.masks(&parts)?;
    let e = esq::esq_upper_bound(&state.inner, &masks, &budget(d_e_max, restarts, iterations, seed)).py()?;
    let extension = match e.best_channel.kind {
        esq::ChannelKind::Trivial => "trivial",
        esq::ChannelKind::ClassicalFlag => "classical_flag",
        esq::ChannelKind::Parameterized => "parameterized",
    };
    Ok(PyEsqEstimate {
        value: e.value,
        baseline: e.baseline,
        extension: extension.to_string(),
        d_e: e.best_channel.d_e,
        d_g: e.best_channel.d_g,
    })
}

/// `"achievable"`, `"gap"` or `"not_achievable"`.
#[pyfunction]
#[pyo3(signature = (state, point, reference=None, d_e_max=4, restarts=4, iterations=200, seed=0))]
fn classify(
    state: &PyState,
    point: Vec<f64>,
    reference: Option<String>,
    d_e_max: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> PyResult<String> {
    let region = PyRegion::new(state, reference)?;
    let q = region.point(point)?;
    let (outer, _) =
        esq::estimate_outer_bound(&state.inner, &region.rc, &budget(d_e_max, restarts, iterations, seed)).py()?;
    Ok(esq::classify_rate_point(&q, &region.rc, &outer, FEASIBILITY_TOL).py()?.to_string())
}

#[pyclass(frozen, get_all, name = "CurvePoint")]
struct PyCurvePoint {
    q: f64,
    qubits_sent: usize,
    trials: usize,
    mean_dist: f64,
    stderr_dist: f64,
    mean_fid: f64,
}

#[pymethods]
impl PyCurvePoint {
    fn __repr__(&self) -> String {
        format!("CurvePoint(q={}, mean_dist={}, stderr_dist={})", self.q, self.mean_dist, self.stderr_dist)
    }
}

/// Monte Carlo decoupling of `sender` from `reference` under random unitary encoding.
#[pyfunction]
#[pyo3(signature = (state, sender, reference, grid, copies=1, trials=100, seed=0, typical_delta=None))]
#[allow(clippy::too_many_arguments)]
fn decoupling_curve(
    state: &PyState,
    sender: &str,
    reference: &str,
    grid: Vec<f64>,
    copies: usize,
    trials: usize,
    seed: u64,
    typical_delta: Option<f64>,
) -> PyResult<Vec<PyCurvePoint>> {
    let mut cfg = DecouplingConfig::new(sender, reference, copies, grid, trials, seed);
    cfg.typical_delta = typical_delta;
    let curve = sim::decoupling_curve(&state.inner, &cfg).py()?;
    Ok(curve
        .points
        .into_iter()
        .map(|p| PyCurvePoint {
            q: p.q,
            qubits_sent: p.qubits_sent,
            trials: p.trials,
            mean_dist: p.mean_dist,
            stderr_dist: p.stderr_dist,
            mean_fid: p.mean_fid,
        })
        .collect())
}

#[pyfunction]
fn binary_entropy(x: f64) -> PyResult<f64> {
    esq::binary_entropy(x).py()
}

#[pyfunction]
fn epsilon_prime(epsilon: f64, dims: Vec<usize>) -> PyResult<f64> {
    esq::epsilon_prime(epsilon, &dims).py()
}

/// `(value, out_of_range)`.
#[pyfunction]
fn f1(epsilon: f64, n: usize, d_a: usize) -> PyResult<(f64, bool)> {
    let b = esq::f1(epsilon, n, d_a).py()?;
    Ok((b.value, b.out_of_range))
}

#[pymodule]
fn qdistcomp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyRegion>()?;
    m.add_class::<PyEsqEstimate>()?;
    m.add_class::<PyCurvePoint>()?;
    m.add_function(wrap_pyfunction!(esq_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(decoupling_curve, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_prime, m)?)?;
    m.add_function(wrap_pyfunction!(f1, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
