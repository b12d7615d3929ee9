//! Python bindings for `fracstab_core`.
//!
//! Model-level functions take and return dimensional quantities (mV, ms,
//! uA/cm2); characteristic-equation functions work on the raw coefficients.

use fracstab_core::charcore as cc;
use fracstab_core::fodesolve as fs;
use fracstab_core::mlmodel as ml;
use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: fracstab_core::Error) -> PyErr {
    match e {
        fracstab_core::Error::NoConvergence { .. } | fracstab_core::Error::Solver(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "CharTriple", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCharTriple {
    inner: cc::CharTriple,
}

#[pymethods]
impl PyCharTriple {
    #[new]
    fn new(a: f64, b: f64, c: f64, q: f64) -> PyResult<Self> {
        Ok(Self {
            inner: cc::CharTriple::new(a, b, c, q).map_err(to_py)?,
        })
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
    fn c(&self) -> f64 {
        self.inner.c()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q()
    }

    #[pyo3(signature = (tol = cc::DEFAULT_TOL))]
    fn classify(&self, tol: f64) -> PyResult<PyVerdict> {
        cc::classify(&self.inner, tol).map(PyVerdict::from).map_err(to_py)
    }

    fn delta(&self, s: Complex64) -> Complex64 {
        cc::delta_eval(s, &self.inner)
    }

    fn __repr__(&self) -> String {
        let t = &self.inner;
        format!("CharTriple(a={}, b={}, c={}, q={})", t.a(), t.b(), t.c(), t.q())
    }
}

#[pyclass(name = "StabilityVerdict", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyVerdict {
    kind: String,
    order_independent: bool,
    a_star: Option<f64>,
    hopf_omega: Option<f64>,
    decay_order: Option<f64>,
}

impl From<cc::StabilityVerdict> for PyVerdict {
    fn from(v: cc::StabilityVerdict) -> Self {
        Self {
            kind: v.kind.to_string(),
            order_independent: v.order_independent,
            a_star: v.a_star,
            hopf_omega: v.hopf_omega,
            decay_order: v.decay_order,
        }
    }
}

#[pymethods]
impl PyVerdict {
    #[getter]
    fn is_stable(&self) -> bool {
        self.kind == cc::StabilityKind::AsymptoticallyStable.as_str()
    }

    fn __repr__(&self) -> String {
        format!(
            "StabilityVerdict(kind={:?}, order_independent={})",
            self.kind, self.order_independent
        )
    }
}

#[pyfunction]
#[pyo3(signature = (a, b, c, q, tol = cc::DEFAULT_TOL))]
fn classify(a: f64, b: f64, c: f64, q: f64, tol: f64) -> PyResult<PyVerdict> {
    let t = cc::CharTriple::new(a, b, c, q).map_err(to_py)?;
    cc::classify(&t, tol).map(PyVerdict::from).map_err(to_py)
}

/// Returns `(a_star, omega)`.
#[pyfunction]
fn a_star(b: f64, c: f64, q: f64) -> PyResult<(f64, f64)> {
    let h = cc::a_star(b, c, q).map_err(to_py)?;
    Ok((h.a_star, h.omega))
}

#[pyfunction]
fn transversality(b: f64, c: f64, q: f64) -> PyResult<f64> {
    cc::transversality(b, c, q).map_err(to_py)
}

#[pyfunction]
fn h_q(omega: f64, q: f64) -> PyResult<f64> {
    cc::h_q(omega, q).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (y, q, tol = cc::DEFAULT_TOL))]
fn h_q_inverse(y: f64, q: f64, tol: f64) -> PyResult<f64> {
    cc::h_q_inverse(y, q, tol).map_err(to_py)
}

#[pyfunction]
fn delta_eval(s: Complex64, a: f64, b: f64, c: f64, q: f64) -> PyResult<Complex64> {
    let t = cc::CharTriple::new(a, b, c, q).map_err(to_py)?;
    Ok(cc::delta_eval(s, &t))
}

/// Principal-sheet roots for rational order `q = p/m`.
#[pyfunction]
#[pyo3(signature = (a, b, c, p, m, tol = 1e-8))]
fn oracle_roots(a: f64, b: f64, c: f64, p: u32, m: u32, tol: f64) -> PyResult<Vec<Complex64>> {
    let t = cc::CharTriple::new(a, b, c, p as f64 / m as f64).map_err(to_py)?;
    Ok(cc::oracle_roots_rational(&t, p, m, tol).map_err(to_py)?.roots)
}

#[pyfunction]
#[pyo3(signature = (q, t, terms = fs::ML_MAX_TERMS))]
fn ml_reference(q: f64, t: f64, terms: usize) -> PyResult<f64> {
    Ok(fs::ml_reference(q, t, terms).map_err(to_py)?.value)
}

#[pyclass(name = "MLParams", skip_from_py_object)]
#[derive(Clone)]
struct PyMLParams {
    inner: ml::MLParams,
}

#[pymethods]
impl PyMLParams {
    /// Defaults, with any parameter overridable by keyword (`g_L`, `I`, `q`, ...).
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<std::collections::HashMap<String, f64>>) -> PyResult<Self> {
        let mut inner = ml::MLParams::default();
        let mut pairs: Vec<_> = kwargs.unwrap_or_default().into_iter().collect();
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        for (k, v) in pairs {
            inner.set(&k, v).map_err(|e| PyKeyError::new_err(e.to_string()))?;
        }
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: ml::MLParams::parse(text).map_err(to_py)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_kv_string()
    }

    fn get(&self, key: &str) -> PyResult<f64> {
        self.inner
            .get(key)
            .ok_or_else(|| PyKeyError::new_err(key.to_string()))
    }

    fn set(&mut self, key: &str, value: f64) -> PyResult<()> {
        self.inner.set(key, value).map_err(|e| PyKeyError::new_err(e.to_string()))
    }

    fn to_dict(&self) -> Vec<(String, f64)> {
        ml::PARAM_KEYS
            .iter()
            .map(|k| (k.to_string(), self.inner.get(k).unwrap_or(f64::NAN)))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("MLParams(I={}, q={})", self.inner.i_app, self.inner.q)
    }
}

#[pyclass(name = "DimlessParams", frozen, get_all)]
struct PyDimless {
    gamma_ca: f64,
    gamma_k: f64,
    gamma_l: f64,
    v_k: f64,
    v_l: f64,
    v1: f64,
    v2: f64,
    v3: f64,
    v4: f64,
    i_tilde: f64,
    phi: f64,
    q: f64,
    current_scale: f64,
}

#[pyfunction]
fn nondimensionalize(params: PyRef<'_, PyMLParams>) -> PyResult<PyDimless> {
    let d = ml::nondimensionalize(&params.inner).map_err(to_py)?;
    Ok(PyDimless {
        gamma_ca: d.gamma_ca,
        gamma_k: d.gamma_k,
        gamma_l: d.gamma_l,
        v_k: d.v_k,
        v_l: d.v_l,
        v1: d.v1,
        v2: d.v2,
        v3: d.v3,
        v4: d.v4,
        i_tilde: d.i_tilde,
        phi: d.phi,
        q: d.q,
        current_scale: d.scales.current(),
    })
}

#[pyclass(name = "Equilibrium", frozen, get_all)]
struct PyEquilibrium {
    branch: String,
    /// mV
    v_star: f64,
    n_star: f64,
    triple: PyCharTriple,
    verdict: PyVerdict,
    q_critical: Option<f64>,
    q_roots: Vec<f64>,
}

#[pymethods]
impl PyEquilibrium {
    fn __repr__(&self) -> String {
        format!(
            "Equilibrium(branch={}, V={:.4} mV, verdict={})",
            self.branch, self.v_star, self.verdict.kind
        )
    }
}

/// Equilibria at applied current `current` (uA/cm2), ordered by voltage.
#[pyfunction]
#[pyo3(signature = (current, params, tol = 1e-10))]
fn equilibria(current: f64, params: PyRef<'_, PyMLParams>, tol: f64) -> PyResult<Vec<PyEquilibrium>> {
    let d = ml::nondimensionalize(&params.inner).map_err(to_py)?;
    let recs = ml::equilibria(d.current_to_dimless(current), &d, tol).map_err(to_py)?;
    Ok(recs
        .into_iter()
        .map(|r| PyEquilibrium {
            branch: r.branch.to_string(),
            v_star: d.voltage_to_dim(r.v_star),
            n_star: r.n_star,
            triple: PyCharTriple { inner: r.triple },
            verdict: r.verdict.into(),
            q_critical: r.q_critical,
            q_roots: r.q_roots,
        })
        .collect())
}

/// Knees, folds and special voltages in mV and uA/cm2, keyed by name.
#[pyfunction]
#[pyo3(signature = (params, tol = 1e-10))]
fn special_points(params: PyRef<'_, PyMLParams>, tol: f64) -> PyResult<Vec<(String, f64)>> {
    let d = ml::nondimensionalize(&params.inner).map_err(to_py)?;
    let g = ml::special_points(&d, tol).map_err(to_py)?;
    Ok(vec![
        ("V_alpha".into(), d.voltage_to_dim(g.v_alpha)),
        ("V_beta".into(), d.voltage_to_dim(g.v_beta)),
        ("I_max".into(), d.current_to_dim(g.i_max)),
        ("I_min".into(), d.current_to_dim(g.i_min)),
        ("V_prime".into(), d.voltage_to_dim(g.v_prime)),
        ("V_triple_prime".into(), d.voltage_to_dim(g.v_triple_prime)),
        ("V_double_prime".into(), d.voltage_to_dim(g.v_double_prime)),
    ])
}

/// Critical order of the equilibrium at `v_star` (mV).
#[pyfunction]
#[pyo3(signature = (v_star, params, tol = 1e-10))]
fn critical_q(v_star: f64, params: PyRef<'_, PyMLParams>, tol: f64) -> PyResult<Option<f64>> {
    let d = ml::nondimensionalize(&params.inner).map_err(to_py)?;
    ml::critical_q(d.voltage_to_dimless(v_star), &d, tol).map_err(to_py)
}

/// Integrates the neuron; returns `(t_ms, V_mV, n, diverged)`. Starts from
/// rest unless `v0` (mV) and/or `n0` are given.
#[pyfunction]
#[pyo3(signature = (params, t_end_ms, dt_ms = 0.1, v0 = None, n0 = None, corrector_iters = 1))]
fn simulate(
    py: Python<'_>,
    params: PyRef<'_, PyMLParams>,
    t_end_ms: f64,
    dt_ms: f64,
    v0: Option<f64>,
    n0: Option<f64>,
    corrector_iters: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>, bool)> {
    let d = ml::nondimensionalize(&params.inner).map_err(to_py)?;
    let rest = ml::resting_state(&d, 1e-10).map_err(to_py)?;
    let x0 = (v0.map(|v| d.voltage_to_dimless(v)).unwrap_or(rest.0), n0.unwrap_or(rest.1));
    let opts = fs::SolverOptions {
        corrector_iters,
        ..fs::SolverOptions::default()
    };
    let (t_end, h) = (d.time_to_dimless(t_end_ms), d.time_to_dimless(dt_ms));
    let traj = py
        .detach(|| ml::simulate_neuron(&d, x0, t_end, h, &opts))
        .map_err(to_py)?;
    let t = traj.times.iter().map(|&t| d.time_to_dim(t)).collect();
    let v = traj.component(0).iter().map(|&v| d.voltage_to_dim(v)).collect();
    Ok((t, v, traj.component(1), traj.diverged))
}

/// Upward crossings of `threshold` separated by at least `min_separation`.
#[pyfunction]
#[pyo3(signature = (times, values, threshold = ml::SPIKE_THRESHOLD_MV, min_separation = ml::SPIKE_MIN_SEPARATION_MS))]
fn spike_times(times: Vec<f64>, values: Vec<f64>, threshold: f64, min_separation: f64) -> Vec<f64> {
    ml::spike_times(&times, &values, threshold, min_separation)
}

#[pymodule]
fn fracstab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCharTriple>()?;
    m.add_class::<PyVerdict>()?;
    m.add_class::<PyMLParams>()?;
    m.add_class::<PyDimless>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(a_star, m)?)?;
    m.add_function(wrap_pyfunction!(transversality, m)?)?;
    m.add_function(wrap_pyfunction!(h_q, m)?)?;
    m.add_function(wrap_pyfunction!(h_q_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(delta_eval, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_roots, m)?)?;
    m.add_function(wrap_pyfunction!(ml_reference, m)?)?;
    m.add_function(wrap_pyfunction!(nondimensionalize, m)?)?;
    m.add_function(wrap_pyfunction!(equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(special_points, m)?)?;
    m.add_function(wrap_pyfunction!(critical_q, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(spike_times, m)?)?;
    Ok(())
}
