//! Python bindings for `hanoi-dimer-core`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use hanoi_dimer_core::appendix_check::{parse_certificate, AppendixChecker};
use hanoi_dimer_core::decimal::round_half_even;
use hanoi_dimer_core::entropy;
use hanoi_dimer_core::evolve::{self, BoundaryClassVector};
use hanoi_dimer_core::hanoi_graph::HanoiGraph;
use hanoi_dimer_core::matching_oracle::{boundary_class_vector, count_constrained, CornerConstraint, OracleLimits};
use hanoi_dimer_core::multipoly::{self, VarSet};
use hanoi_dimer_core::recursion_gen;
use hanoi_dimer_core::Error;

create_exception!(hanoi_dimer, HanoiError, PyException, "Computation or integrity failure.");
create_exception!(hanoi_dimer, ResourceLimitError, HanoiError, "A size cap or budget was exceeded.");

fn to_py(e: Error) -> PyErr {
    match e {
        e if e.is_resource_limit() => ResourceLimitError::new_err(e.to_string()),
        Error::InvalidArgument(_) | Error::Parse(_) | Error::UnboundVariable(_) | Error::Domain(_) => {
            PyValueError::new_err(e.to_string())
        }
        e => HanoiError::new_err(e.to_string()),
    }
}

fn check_d(d: usize) -> PyResult<()> {
    if d < 2 {
        return Err(PyValueError::new_err(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// Sparse polynomial with integer coefficients over named variables.
#[pyclass(frozen, eq, from_py_object, name = "Polynomial", module = "hanoi_dimer")]
#[derive(Clone, PartialEq)]
struct PyPolynomial(multipoly::Polynomial);

#[pymethods]
impl PyPolynomial {
    #[staticmethod]
    fn parse(text: &str, variables: Vec<String>) -> PyResult<Self> {
        multipoly::Polynomial::parse(text, &VarSet::new(variables))
            .map(PyPolynomial)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.0.vars().names().to_vec()
    }

    fn serialize(&self) -> String {
        self.0.serialize()
    }

    fn evaluate(&self, point: HashMap<String, BigInt>) -> PyResult<BigInt> {
        self.0.evaluate_int(&point).map_err(to_py)
    }

    fn coefficient(&self, factors: Vec<(String, u32)>) -> BigInt {
        let factors: Vec<(&str, u32)> = factors.iter().map(|(n, e)| (n.as_str(), *e)).collect();
        self.0.coefficient(&factors)
    }

    fn total_degree(&self) -> Option<u32> {
        self.0.total_degree()
    }

    fn __add__(&self, other: &Self) -> Self {
        PyPolynomial(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        PyPolynomial(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyPolynomial(&self.0 * &other.0)
    }

    fn __pow__(&self, e: u32, _modulo: Option<Py<PyAny>>) -> Self {
        PyPolynomial(self.0.pow(e))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.serialize()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({:?})", self.0.serialize())
    }
}

/// Boundary-class recursion for one dimension.
#[pyclass(frozen, name = "RecursionSystem", module = "hanoi_dimer")]
struct PyRecursionSystem(recursion_gen::RecursionSystem);

#[pymethods]
impl PyRecursionSystem {
    #[staticmethod]
    fn generate(d: usize) -> PyResult<Self> {
        check_d(d)?;
        recursion_gen::generate(d).map(PyRecursionSystem).map_err(to_py)
    }

    #[staticmethod]
    fn from_cache_text(text: &str) -> PyResult<Self> {
        recursion_gen::RecursionSystem::from_cache_text(text).map(PyRecursionSystem).map_err(to_py)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn classes(&self) -> Vec<PyPolynomial> {
        self.0.classes().iter().cloned().map(PyPolynomial).collect()
    }

    #[getter]
    fn total(&self) -> PyPolynomial {
        PyPolynomial(self.0.total().clone())
    }

    fn to_cache_text(&self) -> String {
        self.0.to_cache_text()
    }

    /// Class vectors for stages `0..=n_max`.
    fn evolve(&self, py: Python<'_>, n_max: usize) -> PyResult<Vec<Vec<BigInt>>> {
        let stages = py.detach(|| evolve::evolve_to(&self.0, n_max)).map_err(to_py)?;
        Ok(stages.into_iter().map(|v| v.counts().to_vec()).collect())
    }

    /// Ratio forms with the power of the last ratio removed.
    fn ratio_forms(&self) -> Vec<PyPolynomial> {
        recursion_gen::ratio_form(&self.0).forms().iter().cloned().map(PyPolynomial).collect()
    }
}

fn stages(py: Python<'_>, d: usize, n: usize) -> PyResult<Vec<BoundaryClassVector>> {
    check_d(d)?;
    py.detach(|| recursion_gen::generate(d).and_then(|sys| evolve::evolve_to(&sys, n))).map_err(to_py)
}

/// `(classes, total)` at stage `n`.
#[pyfunction]
fn count(py: Python<'_>, d: usize, n: usize) -> PyResult<(Vec<BigInt>, BigInt)> {
    let v = stages(py, d, n)?.pop().expect("stage n");
    Ok((v.counts().to_vec(), v.total().clone()))
}

/// Brute-force `(classes, total)`, plus the count under `constraint` (one
/// letter per corner: m, d or f) when given.
#[pyfunction]
#[pyo3(signature = (d, n, constraint=None))]
fn oracle(d: usize, n: usize, constraint: Option<&str>) -> PyResult<(Vec<BigInt>, BigInt, Option<BigInt>)> {
    check_d(d)?;
    let g = HanoiGraph::build(d, n).map_err(to_py)?;
    let v = boundary_class_vector(&g, OracleLimits::default()).map_err(to_py)?;
    let constrained = match constraint {
        None => None,
        Some(text) => {
            let c: CornerConstraint = text.parse().map_err(to_py)?;
            let n = count_constrained(g.graph(), g.corners(), &c, OracleLimits::default()).map_err(to_py)?;
            Some(BigInt::from(n))
        }
    };
    Ok((v.counts().to_vec(), v.total().clone(), constrained))
}

/// Ratios `c_k / c_{k+1}` for stages `1..=max_n`, rendered to `digits` places.
#[pyfunction]
#[pyo3(signature = (d, max_n=5, digits=15))]
fn ratios(py: Python<'_>, d: usize, max_n: usize, digits: usize) -> PyResult<Vec<Vec<String>>> {
    let s = stages(py, d, max_n)?;
    let trace = evolve::ratios(&s[1..]).map_err(to_py)?;
    Ok(trace.stages().iter().map(|st| st.ratios.iter().map(|r| round_half_even(r, digits)).collect()).collect())
}

/// Certified entropy bounds at stage `k` with `precision` digits.
#[pyfunction]
#[pyo3(signature = (d, k=6, precision=160))]
fn entropy_bounds(py: Python<'_>, d: usize, k: usize, precision: usize) -> PyResult<BTreeMap<&'static str, String>> {
    let s = stages(py, d, k)?;
    let b = py.detach(|| entropy::bounds(&s, k, precision)).map_err(to_py)?;
    Ok(BTreeMap::from([
        ("lower", b.lower.to_string()),
        ("upper", b.upper.to_string()),
        ("certified_prefix", b.certified_prefix),
        ("certified_digits", b.certified_digits.to_string()),
    ]))
}

/// Outcome of each requested certificate: "pass", "FAIL: ..." or "not attempted: ...".
#[pyfunction]
#[pyo3(signature = (d, which="all"))]
fn appendix_check(py: Python<'_>, d: usize, which: &str) -> PyResult<BTreeMap<String, String>> {
    check_d(d)?;
    let certs = parse_certificate(which).map_err(to_py)?;
    py.detach(|| {
        let sys = recursion_gen::generate(d)?;
        let checker = AppendixChecker::new(&sys);
        Ok(certs.into_iter().map(|c| (c.name().to_string(), checker.run(c).outcome.to_string())).collect())
    })
    .map_err(to_py)
}

#[pymodule]
fn hanoi_dimer(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyRecursionSystem>()?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(ratios, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(appendix_check, m)?)?;
    m.add("HanoiError", m.py().get_type::<HanoiError>())?;
    m.add("ResourceLimitError", m.py().get_type::<ResourceLimitError>())?;
    Ok(())
}
