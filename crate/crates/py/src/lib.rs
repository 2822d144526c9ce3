//! Python bindings. Integers cross the boundary as Python `int`; ratios and
//! exponents as `"a/c"` strings.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use digitwitness_core as core;
use digitwitness_core::{Exponent, RatioTarget, RunLengthPattern};

create_exception!(digitwitness, DigitWitnessError, PyException);

fn err(e: core::Error) -> PyErr {
    DigitWitnessError::new_err(format!("{}: {e}", e.kind()))
}

fn ratio(s: &str) -> PyResult<RatioTarget> {
    s.parse().map_err(err)
}

fn exponent(s: &str) -> PyResult<Exponent> {
    s.parse().map_err(err)
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).expect("reports serialize");
    py.import("json")?.call_method1("loads", (text,))
}

/// A verified witness together with its construction trace.
#[pyclass(name = "WitnessReport", module = "digitwitness", frozen)]
struct PyWitnessReport {
    inner: core::WitnessReport,
}

#[pymethods]
impl PyWitnessReport {
    #[getter]
    fn base(&self) -> u32 {
        self.inner.q
    }

    #[getter]
    fn exponent(&self) -> String {
        self.inner.exponent.to_string()
    }

    #[getter]
    fn witness(&self) -> BigUint {
        self.inner.witness.clone()
    }

    #[getter]
    fn s_u(&self) -> u64 {
        self.inner.s_u
    }

    #[getter]
    fn s_fu(&self) -> u64 {
        self.inner.s_fu
    }

    #[getter]
    fn ratio(&self) -> String {
        self.inner.ratio.to_string()
    }

    #[getter]
    fn route(&self) -> &'static str {
        self.inner.trace.route.as_str()
    }

    #[getter]
    fn verified(&self) -> bool {
        self.inner.verified
    }

    #[getter]
    fn pattern(&self) -> String {
        self.inner.pattern().to_string()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).expect("reports serialize")
    }

    fn __repr__(&self) -> String {
        format!(
            "WitnessReport(base={}, exponent={}, ratio={}, route={}, verified={})",
            self.inner.q,
            self.inner.exponent,
            self.inner.ratio,
            self.inner.trace.route.as_str(),
            if self.inner.verified { "True" } else { "False" },
        )
    }
}

impl From<core::WitnessReport> for PyWitnessReport {
    fn from(inner: core::WitnessReport) -> Self {
        PyWitnessReport { inner }
    }
}

/// Sum of the base-`q` digits of `n`.
#[pyfunction]
fn digit_sum(n: BigUint, q: u32) -> PyResult<u64> {
    core::digit_sum(&n, q).map_err(err)
}

/// Base-`q` digits of `n`, most significant first.
#[pyfunction]
fn expand(n: BigUint, q: u32) -> PyResult<Vec<u32>> {
    Ok(core::expand(&n, q).map_err(err)?.digits().to_vec())
}

/// Run-length pattern text such as `"b2:1^4 0^1 1^5"`.
#[pyfunction]
fn pattern(n: BigUint, q: u32) -> PyResult<String> {
    Ok(RunLengthPattern::of(&n, q).map_err(err)?.to_string())
}

#[pyfunction]
fn from_pattern(text: &str) -> PyResult<BigUint> {
    let p: RunLengthPattern = text.parse().map_err(err)?;
    core::from_pattern(&p).map_err(err)
}

/// Constructs `u` with `s_q(f(u)) / s_q(u)` equal to `ratio`.
#[pyfunction]
#[pyo3(signature = (q, ratio, exponent = "2"))]
fn witness(q: u32, ratio: &str, exponent: &str) -> PyResult<PyWitnessReport> {
    let r = self::ratio(ratio)?;
    let report = match self::exponent(exponent)? {
        Exponent::Square => core::witness(q, r),
        Exponent::Rational { h, m } => core::witness_frac(q, h, m, r),
    };
    report.map(Into::into).map_err(err)
}

#[pyfunction]
fn witness_frac(q: u32, h: u64, m: u64, ratio: &str) -> PyResult<PyWitnessReport> {
    core::witness_frac(q, h, m, self::ratio(ratio)?)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (u, q, exponent = "2"))]
fn verify_witness(u: BigUint, q: u32, exponent: &str) -> PyResult<PyWitnessReport> {
    core::verify_witness(&u, q, self::exponent(exponent)?)
        .map(Into::into)
        .map_err(err)
}

/// `floor(n^(1/m))`.
#[pyfunction]
fn integer_root(n: BigUint, m: u64) -> PyResult<BigUint> {
    core::integer_root(&n, m).map_err(err)
}

/// Every ratio `s_q(u^2)/s_q(u)` for `1 <= u <= limit`, as a dict.
#[pyfunction]
fn scan<'py>(py: Python<'py>, q: u32, limit: u64) -> PyResult<Bound<'py, PyAny>> {
    let table = py.detach(|| core::scan(q, limit)).map_err(err)?;
    json_to_py(py, &table.to_json())
}

/// Count of `n <= limit` with `s_2(n^2) = s_2(n)`.
#[pyfunction]
fn melfi_count(py: Python<'_>, limit: u64) -> u64 {
    py.detach(|| core::melfi_count(limit))
}

#[pyfunction]
fn calibrate<'py>(py: Python<'py>, q: u32, m: u64) -> PyResult<Bound<'py, PyAny>> {
    let record = py.detach(|| core::calibrate(q, m)).map_err(err)?;
    json_to_py(py, &record)
}

#[pymodule]
#[pyo3(name = "digitwitness")]
fn digitwitness_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DigitWitnessError", m.py().get_type::<DigitWitnessError>())?;
    m.add_class::<PyWitnessReport>()?;
    m.add_function(wrap_pyfunction!(digit_sum, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(pattern, m)?)?;
    m.add_function(wrap_pyfunction!(from_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(witness_frac, m)?)?;
    m.add_function(wrap_pyfunction!(verify_witness, m)?)?;
    m.add_function(wrap_pyfunction!(integer_root, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(melfi_count, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    Ok(())
}
