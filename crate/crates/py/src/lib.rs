//! Python bindings. Reports cross the boundary as JSON and come back as dicts.

use std::fmt::Display;
use std::sync::Arc;
use std::time::Duration;

use permres::equivalence::{self, AffineMap};
use permres::families::{self, PipelineOptions};
use permres::input::{self, FamilySpec};
use permres::stats::NonabelianPolicy;
use permres::{FuncTable, GroupTable, PresOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A finite group with integer element codes `0..q`.
#[pyclass(frozen, skip_from_py_object, module = "permres")]
#[derive(Clone)]
pub struct Group(Arc<GroupTable>);

#[pymethods]
impl Group {
    /// Parse `gf:p^e[:modulus]`, `gf:q`, `zn:a x b` or `cayley:path`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        input::parse_group(spec).map(Group).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (p, e = 1, modulus = None))]
    fn field(p: usize, e: usize, modulus: Option<Vec<usize>>) -> PyResult<Self> {
        GroupTable::field(p, e, modulus.as_deref())
            .map(|g| Group(Arc::new(g)))
            .map_err(err)
    }

    #[staticmethod]
    fn cyclic(factors: Vec<usize>) -> PyResult<Self> {
        GroupTable::cyclic_product(&factors)
            .map(|g| Group(Arc::new(g)))
            .map_err(err)
    }

    #[staticmethod]
    fn from_cayley(rows: Vec<Vec<usize>>) -> PyResult<Self> {
        GroupTable::from_cayley(&rows)
            .map(|g| Group(Arc::new(g)))
            .map_err(err)
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn is_field(&self) -> bool {
        self.0.is_field()
    }

    #[getter]
    fn is_abelian(&self) -> bool {
        self.0.is_abelian()
    }

    fn add(&self, x: usize, y: usize) -> PyResult<usize> {
        let x = self.0.check_element(x).map_err(err)?;
        let y = self.0.check_element(y).map_err(err)?;
        Ok(self.0.add(x, y))
    }

    fn neg(&self, x: usize) -> PyResult<usize> {
        Ok(self.0.neg(self.0.check_element(x).map_err(err)?))
    }

    fn mul(&self, x: usize, y: usize) -> PyResult<usize> {
        let x = self.0.check_element(x).map_err(err)?;
        let y = self.0.check_element(y).map_err(err)?;
        self.0.mul(x, y).map_err(err)
    }

    /// Evaluate a polynomial string over this field.
    fn poly(&self, text: &str) -> PyResult<Function> {
        let p = permres::algebra::parse_poly(text, &self.0).map_err(err)?;
        p.eval(&self.0).map(Function).map_err(err)
    }

    /// Build a function from its value table.
    fn table(&self, values: Vec<usize>) -> PyResult<Function> {
        FuncTable::new(self.0.clone(), values)
            .map(Function)
            .map_err(err)
    }

    /// Parse cycle notation such as `(1 2)(3 4)` or a one-line list.
    fn permutation(&self, text: &str) -> PyResult<Function> {
        equivalence::parse_permutation(text, &self.0)
            .map(Function)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Group({:?})", self.0.describe())
    }
}

/// A function on a group, stored as its lookup table.
#[pyclass(frozen, skip_from_py_object, module = "permres")]
#[derive(Clone)]
pub struct Function(FuncTable);

#[pymethods]
impl Function {
    #[new]
    fn new(group: &Group, values: Vec<usize>) -> PyResult<Self> {
        group.table(values)
    }

    #[getter]
    fn group(&self) -> Group {
        Group(self.0.group().clone())
    }

    #[getter]
    fn values(&self) -> Vec<usize> {
        self.0.values().to_vec()
    }

    #[getter]
    fn image_size(&self) -> usize {
        self.0.image_size()
    }

    #[getter]
    fn uniformity(&self) -> usize {
        self.0.uniformity()
    }

    fn is_permutation(&self) -> bool {
        self.0.is_permutation()
    }

    fn image(&self) -> Vec<usize> {
        self.0.image()
    }

    /// `self(inner(x))`.
    fn compose(&self, inner: &Function) -> PyResult<Function> {
        self.0.compose(&inner.0).map(Function).map_err(err)
    }

    fn inverse(&self) -> Option<Function> {
        self.0.inverse().map(Function)
    }

    fn __call__(&self, x: usize) -> PyResult<usize> {
        Ok(self.0.get(self.0.group().check_element(x).map_err(err)?))
    }

    fn __add__(&self, other: &Function) -> PyResult<Function> {
        self.0.add(&other.0).map(Function).map_err(err)
    }

    fn __sub__(&self, other: &Function) -> PyResult<Function> {
        self.0.sub(&other.0).map(Function).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.order()
    }

    fn __eq__(&self, other: &Function) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "Function({:?}, {:?})",
            self.0.group().describe(),
            self.0.values()
        )
    }
}

/// Preimage and differential statistics as a dict.
#[pyfunction]
#[pyo3(signature = (f, right_negation = false))]
fn analyze(py: Python<'_>, f: &Function, right_negation: bool) -> PyResult<Py<PyAny>> {
    let policy = if right_negation {
        NonabelianPolicy::RightNegation
    } else {
        NonabelianPolicy::Reject
    };
    to_py(
        py,
        &permres::stats::analyze_with(&f.0, policy).map_err(err)?,
    )
}

/// Exact permutation resemblance with its certificate, or a bound-limited report.
#[pyfunction]
#[pyo3(signature = (f, *, jobs = 1, max_k = None, max_sets = None, time_limit = None, all_optimal = false, keep = 100, allow_nonabelian = false))]
#[allow(clippy::too_many_arguments)]
fn pres(
    py: Python<'_>,
    f: &Function,
    jobs: usize,
    max_k: Option<usize>,
    max_sets: Option<u64>,
    time_limit: Option<f64>,
    all_optimal: bool,
    keep: usize,
    allow_nonabelian: bool,
) -> PyResult<Py<PyAny>> {
    let opts = PresOptions {
        max_k,
        max_sets,
        time_limit: time_limit.map(Duration::from_secs_f64),
        enumerate_all_optimal: all_optimal,
        keep_optimal: keep,
        allow_nonabelian,
        ..PresOptions::parallel(jobs)
    };
    let outcome = py
        .detach(|| permres::pres_exact(&f.0, &opts))
        .map_err(err)?;
    to_py(py, &outcome)
}

/// Brute force over all permutations, for small orders.
#[pyfunction]
fn pres_oracle(f: &Function) -> PyResult<usize> {
    permres::solver::pres_oracle_bruteforce(&f.0).map_err(err)
}

/// The explicit `g` with `V(g) <= q - V(f) + 1` and `g + f` bijective.
#[pyfunction]
fn upper_bound_witness(f: &Function) -> Function {
    Function(permres::solver::construct_upper_bound_g(&f.0))
}

/// Generate a family member from `ppoly:...`, `quadchar:p` or `monomial:...`.
#[pyfunction]
fn family(py: Python<'_>, spec: &str) -> PyResult<Py<PyAny>> {
    match input::parse_family(spec).map_err(err)? {
        FamilySpec::PPolynomial { group, coeffs } => {
            let g = input::parse_group(&group).map_err(err)?;
            to_py(py, &families::gen_p_polynomial(&g, &coeffs).map_err(err)?)
        }
        FamilySpec::QuadraticCharacter(p) => {
            to_py(py, &families::gen_quadratic_character(p).map_err(err)?)
        }
        FamilySpec::Monomial { group, exponent } => {
            let g = input::parse_group(&group).map_err(err)?;
            to_py(
                py,
                &families::gen_planar_monomial(&g, exponent).map_err(err)?,
            )
        }
    }
}

/// Differential uniformity of the optimal shifted functions `f + g`.
#[pyfunction]
#[pyo3(signature = (f, cap = families::DEFAULT_CANDIDATE_CAP, jobs = 1))]
fn pipeline(py: Python<'_>, f: &Function, cap: usize, jobs: usize) -> PyResult<Py<PyAny>> {
    let opts = PipelineOptions {
        candidate_cap: cap,
        solver: PresOptions::parallel(jobs),
    };
    let report = py
        .detach(|| families::lowdu_pipeline(&f.0, &opts))
        .map_err(err)?;
    to_py(py, &report)
}

/// `a1 * x + b1` applied after `f`, which is applied after `a2 * x + b2`.
#[pyfunction]
fn affine_transform(f: &Function, a1: (usize, usize), a2: (usize, usize)) -> PyResult<Function> {
    let g = f.0.group();
    let a1 = AffineMap::scalar(g, a1.0, a1.1).map_err(err)?;
    let a2 = AffineMap::scalar(g, a2.0, a2.1).map_err(err)?;
    equivalence::affine_transform(&f.0, &a1, &a2)
        .map(Function)
        .map_err(err)
}

#[pymodule]
#[pyo3(name = "permres")]
fn permres_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<Function>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(pres, m)?)?;
    m.add_function(wrap_pyfunction!(pres_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_witness, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(affine_transform, m)?)?;
    Ok(())
}
