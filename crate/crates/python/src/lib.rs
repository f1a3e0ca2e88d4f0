//! Python bindings. Results cross the boundary as plain dicts and lists,
//! built from the same serde representation the CLI prints.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use gradedlc::lcmod::{support, LcContext};
use gradedlc::lyubeznik::{lyubeznik_report, verify_counterexample as verify_ce};
use gradedlc::monomial::{all_degree_classes, MonomialIdeal};
use gradedlc::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::TruncationUnstable { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn ideal(n: usize, generators: Vec<Vec<u64>>) -> PyResult<MonomialIdeal> {
    MonomialIdeal::from_exponents(n, &generators).map_err(err)
}

/// `{j: {class_string: group_string}}` over the nonzero pieces.
#[pyfunction]
pub fn local_cohomology<'py>(py: Python<'py>, n: usize, generators: Vec<Vec<u64>>) -> PyResult<Bound<'py, PyDict>> {
    let ctx = LcContext::new(&ideal(n, generators)?).map_err(err)?;
    let out = PyDict::new(py);
    for (j, h) in ctx.all_local_cohomology().map_err(err)?.iter().enumerate() {
        let d = PyDict::new(py);
        for s in all_degree_classes(n) {
            let p = h.piece(s);
            if !p.is_zero() {
                d.set_item(s.to_string(), p.to_string())?;
            }
        }
        if !d.is_empty() {
            out.set_item(j, d)?;
        }
    }
    Ok(out)
}

#[pyfunction]
pub fn bad_primes(n: usize, generators: Vec<Vec<u64>>) -> PyResult<Vec<u64>> {
    Ok(LcContext::new(&ideal(n, generators)?).map_err(err)?.bad_primes())
}

/// Support primes of `H^j_I(S)` as strings like `(2, x1, x2)`.
#[pyfunction]
pub fn support_of(n: usize, generators: Vec<Vec<u64>>, j: usize) -> PyResult<Vec<String>> {
    let h = LcContext::new(&ideal(n, generators)?)
        .map_err(err)?
        .local_cohomology(j)
        .map_err(err)?;
    Ok(support(&h).primes.iter().map(ToString::to_string).collect())
}

#[pyfunction]
#[pyo3(signature = (n, generators, p, mixed = false))]
pub fn lyubeznik<'py>(
    py: Python<'py>,
    n: usize,
    generators: Vec<Vec<u64>>,
    p: u64,
    mixed: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let ctx = LcContext::new(&ideal(n, generators)?).map_err(err)?;
    to_py(py, &lyubeznik_report(&ctx, p, mixed, None).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p = 2))]
pub fn verify_counterexample<'py>(py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &verify_ce(p).map_err(err)?)
}

#[pymodule]
fn gradedlc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(local_cohomology, m)?)?;
    m.add_function(wrap_pyfunction!(bad_primes, m)?)?;
    m.add_function(wrap_pyfunction!(support_of, m)?)?;
    m.add_function(wrap_pyfunction!(lyubeznik, m)?)?;
    m.add_function(wrap_pyfunction!(verify_counterexample, m)?)?;
    Ok(())
}
