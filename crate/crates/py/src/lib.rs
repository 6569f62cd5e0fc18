//! Python bindings. The module is importable as `nilcap`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nilcap::basiccomm::enumerate_basic;
use nilcap::capability::{
    baer_abelian, capable_class2_2gen, capable_nilprod, verify_class2, verify_witness, CapabilityVerdict,
    Class2Presentation,
};
use nilcap::grouptools::{center_formula, center_order_layered, DEFAULT_CAP};
use nilcap::nilprod::{self, make_group, GroupSpec, NilGroup, Regime};
use nilcap::suites::{run_suite, SuiteConfig, SUITES};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn regime(name: &str) -> PyResult<Regime> {
    match name {
        "generic" => Ok(Regime::Generic),
        "special_2_3" | "special23" => Ok(Regime::Special23),
        "abelian" => Ok(Regime::Abelian),
        _ => Err(PyValueError::new_err(format!("unknown regime {name:?}"))),
    }
}

/// A k-nilpotent product of cyclic groups; an order of 0 means infinite cyclic.
#[pyclass(name = "Group", frozen, module = "nilcap")]
struct PyGroup {
    inner: Arc<NilGroup>,
}

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (class_k, orders, regime = "generic"))]
    fn new(class_k: usize, orders: Vec<u64>, regime: &str) -> PyResult<Self> {
        let spec = GroupSpec::new(class_k, &orders, self::regime(regime)?).map_err(err)?;
        Ok(PyGroup { inner: make_group(&spec).map_err(err)? })
    }

    /// Group order, or None when infinite.
    #[getter]
    fn order(&self) -> Option<BigUint> {
        self.inner.order()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Labels of the normal-form basis, in collection order.
    #[getter]
    fn basis(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn identity(&self) -> PyElement {
        PyElement { inner: nilprod::identity(&self.inner) }
    }

    /// The i-th generator, counted from 1.
    fn generator(&self, i: usize) -> PyResult<PyElement> {
        Ok(PyElement { inner: nilprod::generator(&self.inner, i).map_err(err)? })
    }

    /// Reduce an arbitrary exponent vector to normal form.
    fn element(&self, exponents: Vec<BigInt>) -> PyResult<PyElement> {
        Ok(PyElement { inner: nilprod::reduce(&self.inner, exponents).map_err(err)? })
    }

    fn parse(&self, src: &str) -> PyResult<PyElement> {
        Ok(PyElement { inner: nilprod::parse(&self.inner, src).map_err(err)? })
    }

    /// Generators of the center, from the closed formula.
    fn center(&self) -> PyResult<Vec<PyElement>> {
        let gens = center_formula(&self.inner).map_err(err)?;
        Ok(gens.into_iter().map(|inner| PyElement { inner }).collect())
    }

    #[pyo3(signature = (cap = DEFAULT_CAP))]
    fn center_order(&self, cap: u64) -> PyResult<BigUint> {
        center_order_layered(&self.inner, cap).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Group({})", self.inner.spec())
    }
}

#[pyclass(name = "Element", frozen, eq, hash, skip_from_py_object, module = "nilcap")]
#[derive(Clone, PartialEq, Hash)]
struct PyElement {
    inner: nilprod::Element,
}

impl PyElement {
    fn same_group(&self, other: &Bound<'_, PyAny>) -> PyResult<nilprod::Element> {
        let other = other.cast::<PyElement>().map_err(|_| PyTypeError::new_err("expected an Element"))?;
        Ok(other.get().inner.clone())
    }
}

#[pymethods]
impl PyElement {
    #[getter]
    fn exponents(&self) -> Vec<BigInt> {
        self.inner.exponents().to_vec()
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        let other = self.same_group(other)?;
        Ok(PyElement { inner: self.inner.mul(&other).map_err(err)? })
    }

    fn __pow__(&self, n: BigInt, modulo: Option<&Bound<'_, PyAny>>) -> PyResult<PyElement> {
        if modulo.is_some() {
            return Err(PyTypeError::new_err("three-argument pow is not supported"));
        }
        Ok(PyElement { inner: self.inner.pow(&n) })
    }

    fn __invert__(&self) -> PyElement {
        PyElement { inner: self.inner.inv() }
    }

    fn inverse(&self) -> PyElement {
        self.__invert__()
    }

    /// [self, other] = self^-1 other^-1 self other.
    fn comm(&self, other: &Bound<'_, PyAny>) -> PyResult<PyElement> {
        let other = self.same_group(other)?;
        Ok(PyElement { inner: self.inner.comm(&other).map_err(err)? })
    }

    fn order(&self) -> PyResult<BigUint> {
        self.inner.element_order().map_err(err)
    }

    fn __str__(&self) -> String {
        nilprod::format(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Element({})", nilprod::format(&self.inner))
    }
}

fn verdict_dict<'py>(py: Python<'py>, v: &CapabilityVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("decision", v.decision.to_string())?;
    d.set_item("reason", &v.reason)?;
    d.set_item("citation", &v.citation)?;
    d.set_item("witness", v.witness.as_ref().map(|w| w.description.clone()))?;
    Ok(d)
}

/// Capability of the class_k-nilpotent product of cyclic groups of the given orders.
#[pyfunction]
#[pyo3(signature = (class_k, orders, verify = false, cap = DEFAULT_CAP))]
fn capable<'py>(py: Python<'py>, class_k: usize, orders: Vec<u64>, verify: bool, cap: u64) -> PyResult<Bound<'py, PyDict>> {
    let spec = GroupSpec::generic(class_k, &orders).map_err(err)?;
    let v = capable_nilprod(&spec).map_err(err)?;
    let d = verdict_dict(py, &v)?;
    if verify && v.witness.is_some() {
        d.set_item("verified", verify_witness(&spec, &v, cap).map_err(err)?.verified)?;
    }
    Ok(d)
}

/// Baer's criterion for a direct product of cyclic groups.
#[pyfunction]
fn capable_abelian<'py>(py: Python<'py>, orders: Vec<u64>) -> PyResult<Bound<'py, PyDict>> {
    verdict_dict(py, &baer_abelian(&orders))
}

/// Two-generator class-2 p-group given by (p, alpha, beta, gamma, sigma).
#[pyfunction]
#[pyo3(signature = (p, alpha, beta, gamma, sigma, verify = false, cap = DEFAULT_CAP))]
fn capable_class2<'py>(
    py: Python<'py>,
    p: u64,
    alpha: u32,
    beta: u32,
    gamma: u32,
    sigma: u32,
    verify: bool,
    cap: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let pres = Class2Presentation::new(p, alpha, beta, gamma, sigma).map_err(err)?;
    let v = capable_class2_2gen(&pres);
    let d = verdict_dict(py, &v)?;
    if verify && v.witness.is_some() {
        d.set_item("verified", verify_class2(&pres, &v, cap).map_err(err)?.verified)?;
    }
    Ok(d)
}

/// Labels of the basic commutators of weight <= class_k on r generators.
#[pyfunction]
fn basic_commutators(r: usize, class_k: usize) -> PyResult<Vec<String>> {
    Ok(enumerate_basic(r, class_k).map_err(err)?.labels())
}

/// Run a named verification suite; returns a summary dict.
#[pyfunction]
#[pyo3(name = "run_suite", signature = (name, seed = 0))]
fn py_run_suite<'py>(py: Python<'py>, name: &str, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let cfg = SuiteConfig { seed, ..SuiteConfig::default() };
    let rep = py.detach(|| run_suite(name, &cfg)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("suite", &rep.suite)?;
    d.set_item("seed", rep.seed)?;
    d.set_item("cases", rep.cases)?;
    d.set_item("failures", rep.failures.len())?;
    d.set_item("passed", rep.passed())?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "nilcap")]
fn nilcap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyElement>()?;
    m.add_function(wrap_pyfunction!(capable, m)?)?;
    m.add_function(wrap_pyfunction!(capable_abelian, m)?)?;
    m.add_function(wrap_pyfunction!(capable_class2, m)?)?;
    m.add_function(wrap_pyfunction!(basic_commutators, m)?)?;
    m.add_function(wrap_pyfunction!(py_run_suite, m)?)?;
    m.add("SUITES", SUITES.to_vec())?;
    Ok(())
}
