//! Python bindings: `import pyzerosum`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use zerosum::error::Error;
use zerosum::group::{standard_basis, Element, GroupCtx};
use zerosum::search::{self, SearchConfig};
use zerosum::sequence::Sequence;
use zerosum::structure::{self, conjecture_item, ConjectureParams};
use zerosum::subsums;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Infeasible { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Serializes through JSON into plain dicts and lists.
fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn ctx(n: u32) -> PyResult<GroupCtx> {
    GroupCtx::new(n).map_err(to_py)
}

fn element(ctx: GroupCtx, x: (u32, u32)) -> PyResult<Element> {
    ctx.check(Element::new(x.0, x.1)).map_err(to_py)
}

fn config(max_n: Option<u32>, threads: Option<usize>) -> SearchConfig {
    let mut cfg = SearchConfig { threads, ..SearchConfig::default() };
    if let Some(m) = max_n {
        cfg.max_n = m;
    }
    cfg
}

/// A multiset of elements of `C_n ⊕ C_n`.
#[pyclass(name = "Sequence", module = "pyzerosum", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySequence {
    inner: Sequence,
}

#[pymethods]
impl PySequence {
    #[new]
    #[pyo3(signature = (n, text = ""))]
    fn new(n: u32, text: &str) -> PyResult<Self> {
        Ok(PySequence { inner: Sequence::parse(ctx(n)?, text).map_err(to_py)? })
    }

    /// Builds a sequence from a list of `(a, b)` pairs.
    #[staticmethod]
    fn from_terms(n: u32, terms: Vec<(u32, u32)>) -> PyResult<Self> {
        let c = ctx(n)?;
        let terms = terms.into_iter().map(|x| element(c, x)).collect::<PyResult<Vec<_>>>()?;
        Ok(PySequence { inner: Sequence::from_terms(c, terms).map_err(to_py)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.ctx().n()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sequence({}, {:?})", self.inner.ctx().n(), self.inner.to_string())
    }

    fn __eq__(&self, other: PyRef<'_, PySequence>) -> bool {
        self.inner == other.inner
    }

    fn terms(&self) -> Vec<(u32, u32)> {
        self.inner.terms().map(|e| (e.a, e.b)).collect()
    }

    fn counts(&self) -> Vec<((u32, u32), u32)> {
        self.inner.counts().map(|(e, k)| ((e.a, e.b), k)).collect()
    }

    fn support(&self) -> Vec<(u32, u32)> {
        self.inner.support().map(|e| (e.a, e.b)).collect()
    }

    fn multiplicity(&self, x: (u32, u32)) -> PyResult<u32> {
        Ok(self.inner.multiplicity(element(self.inner.ctx(), x)?))
    }

    fn height(&self) -> u32 {
        self.inner.height()
    }

    fn sigma(&self) -> (u32, u32) {
        let s = self.inner.sigma();
        (s.a, s.b)
    }

    #[pyo3(signature = (x, k = 1))]
    fn with_term(&self, x: (u32, u32), k: u32) -> PyResult<Self> {
        let x = element(self.inner.ctx(), x)?;
        Ok(PySequence { inner: self.inner.with(x, k).map_err(to_py)? })
    }

    #[pyo3(signature = (x, k = 1))]
    fn remove_term(&self, x: (u32, u32), k: u32) -> PyResult<Self> {
        let x = element(self.inner.ctx(), x)?;
        Ok(PySequence { inner: self.inner.remove_term(x, k).map_err(to_py)? })
    }

    fn concat(&self, other: PyRef<'_, PySequence>) -> PyResult<Self> {
        Ok(PySequence { inner: self.inner.concat(&other.inner).map_err(to_py)? })
    }

    fn divides(&self, other: PyRef<'_, PySequence>) -> bool {
        self.inner.divides(&other.inner)
    }
}

#[pyfunction]
fn parse(n: u32, text: &str) -> PyResult<PySequence> {
    PySequence::new(n, text)
}

#[pyfunction]
fn is_basis(n: u32, e1: (u32, u32), e2: (u32, u32)) -> PyResult<bool> {
    let c = ctx(n)?;
    Ok(c.is_basis(element(c, e1)?, element(c, e2)?))
}

#[pyfunction]
fn has_zero_sum_le(s: PyRef<'_, PySequence>, ell: usize) -> bool {
    subsums::has_zero_sum_le(&s.inner, ell)
}

/// Elements of `Σ_{≤ℓ}(S)` in lexicographic order.
#[pyfunction]
fn sigma_le(s: PyRef<'_, PySequence>, ell: usize) -> Vec<(u32, u32)> {
    subsums::sigma_le(&s.inner, ell).iter().map(|e| (e.a, e.b)).collect()
}

/// A shortest zero-sum subsequence of length `≤ ℓ`, if any.
#[pyfunction]
fn find_zero_sum_le(s: PyRef<'_, PySequence>, ell: usize) -> Option<PySequence> {
    subsums::find_zero_sum_le(&s.inner, ell, subsums::WitnessMode::Shortest).map(|inner| PySequence { inner })
}

/// Statistics, zero-sum class, structural properties and, for extremal
/// lengths, the shape match.
#[pyfunction]
fn classify<'py>(py: Python<'py>, s: PyRef<'_, PySequence>) -> PyResult<Bound<'py, PyAny>> {
    let r = search::classify_report(&s.inner).map_err(to_py)?;
    to_object(py, &r)
}

#[pyfunction]
fn match_conjecture<'py>(py: Python<'py>, s: PyRef<'_, PySequence>, k: u32) -> PyResult<Bound<'py, PyAny>> {
    let r = structure::match_conjecture(&s.inner, k).map_err(to_py)?;
    to_object(py, &r)
}

#[pyfunction]
fn canonicalize(s: PyRef<'_, PySequence>) -> PyResult<PySequence> {
    Ok(PySequence { inner: structure::canonicalize(&s.inner).map_err(to_py)? })
}

/// The conjectured sequence at level `k` in the standard basis. `x` and
/// `xs` parametrize shapes 4 and 2; defaults are `1` and `(1, 0, ..., 0)`.
#[pyfunction]
#[pyo3(signature = (n, k, item = None, x = None, xs = None))]
fn construct(n: u32, k: u32, item: Option<u8>, x: Option<u32>, xs: Option<Vec<u32>>) -> PyResult<PySequence> {
    let c = ctx(n)?;
    if n < 2 || k >= n {
        return Err(PyValueError::new_err(format!("need n >= 2 and k < n, got n = {n}, k = {k}")));
    }
    let xs = xs.unwrap_or_else(|| {
        let mut v = vec![0; n as usize];
        v[0] = 1;
        v
    });
    let params = match item.unwrap_or_else(|| conjecture_item(n, k)) {
        1 => ConjectureParams::Item1 { appended: standard_basis(c).1, xs },
        2 => {
            let sum_class = (xs.iter().map(|&v| v as u64).sum::<u64>() % n as u64) as u32;
            ConjectureParams::Item2 { xs, sum_class }
        }
        3 => ConjectureParams::Item3,
        4 => ConjectureParams::Item4 { x: x.unwrap_or(1) },
        other => return Err(PyValueError::new_err(format!("item must be 1..=4, got {other}"))),
    };
    let inner = structure::construct_conjectured(c, k, standard_basis(c), &params).map_err(to_py)?;
    Ok(PySequence { inner })
}

#[pyfunction]
#[pyo3(signature = (n, max_n = None, threads = None))]
fn compute_davenport(py: Python<'_>, n: u32, max_n: Option<u32>, threads: Option<usize>) -> PyResult<u32> {
    let cfg = config(max_n, threads);
    py.detach(|| search::compute_davenport(n, &cfg)).map(|v| v.value).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (n, ell, max_n = None, threads = None))]
fn compute_s_le(py: Python<'_>, n: u32, ell: u32, max_n: Option<u32>, threads: Option<usize>) -> PyResult<u32> {
    let cfg = config(max_n, threads);
    py.detach(|| search::compute_s_le(n, ell, &cfg)).map(|v| v.value).map_err(to_py)
}

/// One canonical representative per orbit of extremal sequences.
#[pyfunction]
#[pyo3(signature = (n, k, max_n = None, threads = None))]
fn enumerate_extremal(
    py: Python<'_>,
    n: u32,
    k: u32,
    max_n: Option<u32>,
    threads: Option<usize>,
) -> PyResult<Vec<PySequence>> {
    let cfg = config(max_n, threads);
    let e = py.detach(|| search::enumerate_extremal(n, k, &cfg)).map_err(to_py)?;
    Ok(e.reps.into_iter().map(|inner| PySequence { inner }).collect())
}

/// The full verification report as a dict.
#[pyfunction]
#[pyo3(signature = (n, k, max_n = None, threads = None))]
fn verify_conjecture<'py>(
    py: Python<'py>,
    n: u32,
    k: u32,
    max_n: Option<u32>,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config(max_n, threads);
    let r = py.detach(|| search::verify_conjecture(n, k, &cfg)).map_err(to_py)?;
    to_object(py, &r)
}

#[pymodule]
fn pyzerosum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(is_basis, m)?)?;
    m.add_function(wrap_pyfunction!(has_zero_sum_le, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_le, m)?)?;
    m.add_function(wrap_pyfunction!(find_zero_sum_le, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(match_conjecture, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(compute_davenport, m)?)?;
    m.add_function(wrap_pyfunction!(compute_s_le, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(verify_conjecture, m)?)?;
    Ok(())
}
