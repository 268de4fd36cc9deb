//! Python bindings. Devices, polynomials and designs cross the boundary in
//! their text formats; verdicts and reports as JSON strings.

use algcirc::designs;
use algcirc::intslp::{self, ConstantBinomialOracle};
use algcirc::ir::{parse_device, parse_devices, serialize_devices, Device};
use algcirc::pit;
use algcirc::poly::{self, ExpandCaps};
use algcirc::transform::{self, TransformOptions};
use algcirc::Error;
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(algcirc_py, ResourceError, PyException, "A resource cap was exceeded.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Resource(_) => ResourceError::new_err(e.to_string()),
        Error::Integrity(_) | Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn caps(max_terms: usize, max_degree: u64) -> ExpandCaps {
    ExpandCaps { max_degree, max_terms }
}

/// Polynomial text of every output of every device in `text`.
#[pyfunction]
#[pyo3(signature = (text, max_terms = 1_000_000, max_degree = 64))]
fn expand(text: &str, max_terms: usize, max_degree: u64) -> PyResult<Vec<String>> {
    let mut out = Vec::new();
    for d in parse_devices(text).map_err(to_py)? {
        for f in poly::expand(&d, &caps(max_terms, max_degree)).map_err(to_py)? {
            out.push(f.to_text());
        }
    }
    Ok(out)
}

/// `(kind, nvars, size, product_depth, degree_bound)` of a device.
#[pyfunction]
fn metrics(text: &str) -> PyResult<(String, usize, usize, usize, u64)> {
    let d = parse_device(text).map_err(to_py)?;
    let m = d.metrics();
    Ok((d.kind().to_string(), d.nvars(), m.size, m.product_depth, m.degree_bound))
}

/// p-th root of a device computing a p-th power.
#[pyfunction]
#[pyo3(signature = (text, prune = true))]
fn pth_root(text: &str, prune: bool) -> PyResult<String> {
    let opts = TransformOptions { prune, ..Default::default() };
    let (root, report) = match parse_device(text).map_err(to_py)? {
        Device::Circuit(c) => transform::pth_root_circuit(&c, &opts).map(|(r, rep)| (Device::Circuit(r), rep)),
        Device::Formula(f) => transform::pth_root_formula(&f, &opts).map(|(r, rep)| (Device::Formula(r), rep)),
        Device::Abp(a) => transform::pth_root_abp(&a, &opts).map(|(r, rep)| (Device::Abp(r), rep)),
    }
    .map_err(to_py)?;
    Ok(serialize_devices(&[root], &report.comments()))
}

/// Circuit with one output per type vector, in lexicographic order.
#[pyfunction]
fn mod_p_decompose(text: &str) -> PyResult<String> {
    let c = parse_device(text).and_then(|d| d.to_circuit()).map_err(to_py)?;
    let d = transform::mod_p_decompose_circuit(&c, &TransformOptions::default()).map_err(to_py)?;
    Ok(serialize_devices(&[Device::Circuit(d.circuit)], &d.report.comments()))
}

/// Exact identity test; returns the verdict as JSON.
#[pyfunction]
fn pit_brute(text: &str) -> PyResult<String> {
    let c = parse_device(text).and_then(|d| d.to_circuit()).map_err(to_py)?;
    Ok(pit::pit_bruteforce(&c, &ExpandCaps::default()).map_err(to_py)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (text, trials = 20, set_size = 64, seed = 0))]
fn pit_random(text: &str, trials: u64, set_size: u64, seed: u64) -> PyResult<String> {
    let c = parse_device(text).and_then(|d| d.to_circuit()).map_err(to_py)?;
    Ok(pit::pit_random(&c, trials, set_size, seed).map_err(to_py)?.to_json())
}

#[pyfunction]
fn rs_design(n: usize, m: usize, c: usize, r: usize) -> PyResult<Vec<Vec<usize>>> {
    Ok(designs::rs_design(n, m, c, r).map_err(to_py)?.sets)
}

#[pyfunction]
#[pyo3(signature = (n, m, ell = None))]
fn greedy_design(n: usize, m: usize, ell: Option<usize>) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let d = designs::greedy_design(n, m, ell).map_err(to_py)?;
    Ok((d.ell, d.sets))
}

/// `(value, length)` of the square-and-multiply program for `2^n`.
#[pyfunction]
fn slp_pow2(n: u64) -> (BigInt, usize) {
    let s = intslp::slp_pow2(n);
    (s.eval(), s.len())
}

/// `(value, length)` of the halving-recurrence program for `n!`.
#[pyfunction]
fn slp_factorial(n: u64) -> PyResult<(BigInt, usize)> {
    let r = intslp::shamir_factorial_slp(n, &ConstantBinomialOracle).map_err(to_py)?;
    Ok((r.slp.eval(), r.slp.len()))
}

#[pyfunction]
fn slp_pow2_factorial(n: u32) -> PyResult<(BigInt, usize)> {
    let s = intslp::pow2_factorial_slp(n, &ConstantBinomialOracle).map_err(to_py)?;
    Ok((s.eval(), s.len()))
}

/// `(identity_holds, f(0, 1), C(2n, n) + 2)` for the binomial window
/// polynomial.
#[pyfunction]
fn binomial_window(n: u32) -> PyResult<(bool, String, String)> {
    let r = intslp::check_binomial_window(n).map_err(to_py)?;
    Ok((r.identity_holds, r.f_at_0_1, r.central_plus_two))
}

#[pymodule]
fn algcirc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ResourceError", m.py().get_type::<ResourceError>())?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(pth_root, m)?)?;
    m.add_function(wrap_pyfunction!(mod_p_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(pit_brute, m)?)?;
    m.add_function(wrap_pyfunction!(pit_random, m)?)?;
    m.add_function(wrap_pyfunction!(rs_design, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_design, m)?)?;
    m.add_function(wrap_pyfunction!(slp_pow2, m)?)?;
    m.add_function(wrap_pyfunction!(slp_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(slp_pow2_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_window, m)?)?;
    Ok(())
}
