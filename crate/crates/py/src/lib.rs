//! Python bindings. Field elements cross the boundary as their integer
//! index (the base-`q` digits are the coordinates in the polynomial basis).

use std::collections::BTreeSet;
use std::sync::Arc;

use mrlrc::dss::{parse_transcript, Scheme};
use mrlrc::galois::{ExtField, FieldElement};
use mrlrc::mrlrc::MrLrcParams;
use mrlrc::scenario::Scenario;
use mrlrc::secrecy;
use mrlrc::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Unrecoverable(_) | Error::Invariant(_) | Error::NotPIndependent | Error::TooLarge(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn elements(field: &ExtField, xs: &[u64]) -> PyResult<Vec<FieldElement>> {
    xs.iter().map(|&x| field.element(x).map_err(to_py)).collect()
}

fn indices(xs: &[FieldElement]) -> Vec<u64> {
    xs.iter().map(|x| x.index()).collect()
}

/// `F_{q^m}` with the default modulus.
#[pyclass(name = "Field", frozen)]
struct PyField {
    inner: Arc<ExtField>,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(q: u64, m: usize) -> PyResult<Self> {
        let inner = ExtField::with_default_modulus(q, m).map_err(to_py)?;
        Ok(PyField { inner: Arc::new(inner) })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn size(&self) -> u64 {
        self.inner.size()
    }

    fn add(&self, a: u64, b: u64) -> PyResult<u64> {
        let f = &self.inner;
        Ok(f.add(f.element(a).map_err(to_py)?, f.element(b).map_err(to_py)?).index())
    }

    fn mul(&self, a: u64, b: u64) -> PyResult<u64> {
        let f = &self.inner;
        Ok(f.mul(f.element(a).map_err(to_py)?, f.element(b).map_err(to_py)?).index())
    }

    fn inv(&self, a: u64) -> PyResult<u64> {
        let f = &self.inner;
        f.try_inv(f.element(a).map_err(to_py)?)
            .map(|x| x.index())
            .ok_or_else(|| PyValueError::new_err("zero has no inverse"))
    }

    /// `σ^t(a) = a^(q^t)`.
    #[pyo3(signature = (a, t = 1))]
    fn frobenius(&self, a: u64, t: usize) -> PyResult<u64> {
        let f = &self.inner;
        Ok(f.frobenius(f.element(a).map_err(to_py)?, t).index())
    }

    fn norm(&self, a: u64) -> PyResult<u64> {
        let f = &self.inner;
        Ok(f.field_norm(f.element(a).map_err(to_py)?).index())
    }

    fn coords(&self, a: u64) -> PyResult<Vec<u64>> {
        let f = &self.inner;
        Ok(f.coords(f.element(a).map_err(to_py)?))
    }

    fn __repr__(&self) -> String {
        format!("Field(q={}, m={})", self.inner.q(), self.inner.m())
    }
}

/// An MR-LRC instance.
#[pyclass(name = "MrLrc", frozen)]
struct PyMrLrc {
    inner: Arc<MrLrcParams>,
}

#[pymethods]
impl PyMrLrc {
    #[new]
    fn new(q: u64, m: usize, g: usize, r: usize, delta: usize, k: usize) -> PyResult<Self> {
        let field = Arc::new(ExtField::with_default_modulus(q, m).map_err(to_py)?);
        let inner = MrLrcParams::new(field, g, r, delta, k).map_err(to_py)?;
        Ok(PyMrLrc { inner: Arc::new(inner) })
    }

    #[getter]
    fn g(&self) -> usize {
        self.inner.g()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    #[getter]
    fn delta(&self) -> usize {
        self.inner.delta()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn h(&self) -> usize {
        self.inner.h()
    }

    #[getter]
    fn total_nodes(&self) -> usize {
        self.inner.total_nodes()
    }

    /// Codeword symbols for message `u` (length `k`), group by group.
    fn encode(&self, u: Vec<u64>) -> PyResult<Vec<u64>> {
        let u = elements(self.inner.field(), &u)?;
        Ok(indices(&self.inner.encode(&u).map_err(to_py)?.values))
    }

    /// Recovers a group's block from `r` of its symbols, given as `(node, value)`.
    fn local_decode(&self, group: usize, known: Vec<(usize, u64)>) -> PyResult<Vec<u64>> {
        let f = self.inner.field();
        let known = known
            .into_iter()
            .map(|(j, v)| f.element(v).map(|x| (j, x)).map_err(to_py))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(indices(&self.inner.local_decode(group, &known).map_err(to_py)?))
    }

    fn is_maximally_recoverable(&self, py: Python<'_>) -> PyResult<bool> {
        let params = self.inner.clone();
        let report = py.detach(move || params.is_maximally_recoverable()).map_err(to_py)?;
        Ok(report.is_mr())
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("MrLrc(g={}, r={}, delta={}, k={})", p.g(), p.r(), p.delta(), p.k())
    }
}

fn report_dict<'py>(py: Python<'py>, report: &mrlrc::scenario::AnalysisReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("scheme", report.scheme.to_string())?;
    d.set_item("e", report.e.clone())?;
    d.set_item("formula_direct", report.formula_direct.clone().ok())?;
    d.set_item("formula_forwarded", report.formula_forwarded.clone().ok())?;
    d.set_item("oracle_k_e", report.oracle_k_e)?;
    d.set_item("oracle_k_s", report.oracle_k_s())?;
    d.set_item("verdict", report.verdict.clone())?;
    d.set_item("text", report.to_string())?;
    Ok(d)
}

/// A scenario parsed from TOML text.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(PyScenario {
            inner: Scenario::from_toml_str(text).map_err(to_py)?,
        })
    }

    /// Runs the scenario; returns the report fields plus the transcript text.
    fn simulate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let sim = self.inner.simulate().map_err(to_py)?;
        let d = report_dict(py, &sim.report)?;
        d.set_item("transcript", sim.transcript)?;
        d.set_item("rounds", sim.rounds.len())?;
        Ok(d)
    }

    fn analyze<'py>(&self, py: Python<'py>, transcript: &str) -> PyResult<Bound<'py, PyDict>> {
        let rounds = parse_transcript(self.inner.params.field(), transcript).map_err(to_py)?;
        report_dict(py, &self.inner.analyze(&rounds).map_err(to_py)?)
    }
}

#[pyfunction]
fn secrecy_dim_direct(g: usize, r: usize, h: usize, k: usize, l1: usize, l2: usize, e: Vec<usize>) -> PyResult<usize> {
    secrecy::secrecy_dim_direct(g, r, h, k, l1, l2, &e).map_err(to_py)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn secrecy_dim_forwarded(
    g: usize,
    r: usize,
    h: usize,
    k: usize,
    l1: usize,
    l2_groups: Vec<usize>,
    forwarding_list: Vec<usize>,
    e: Vec<usize>,
) -> PyResult<usize> {
    let groups: BTreeSet<usize> = l2_groups.into_iter().collect();
    secrecy::secrecy_dim_forwarded(g, r, h, k, l1, &groups, &forwarding_list, &e).map_err(to_py)
}

/// `(g, k, ks_direct, ks_forwarded, ks_lrc_no_global)`.
type SweepTuple = (usize, usize, usize, usize, usize);

#[pyfunction]
fn sweep(r: usize, h: usize, l1: usize, l2: usize, g_min: usize, g_max: usize) -> PyResult<Vec<SweepTuple>> {
    let rows = mrlrc::sweep::sweep(mrlrc::sweep::SweepParams { r, h, l1, l2 }, g_min, g_max).map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|x| (x.g, x.k, x.ks_direct, x.ks_forwarded, x.ks_lrc_no_global))
        .collect())
}

/// `(name, passed, detail)` per acceptance criterion.
#[pyfunction]
fn selftest(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(mrlrc::acceptance::run_all)
        .into_iter()
        .map(|o| (o.name.to_string(), o.passed, o.detail))
        .collect()
}

#[pyfunction]
fn parse_scheme(name: &str) -> PyResult<String> {
    name.parse::<Scheme>().map(|s| s.to_string()).map_err(to_py)
}

#[pymodule]
fn mrlrc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyMrLrc>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(secrecy_dim_direct, m)?)?;
    m.add_function(wrap_pyfunction!(secrecy_dim_forwarded, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_function(wrap_pyfunction!(parse_scheme, m)?)?;
    Ok(())
}
