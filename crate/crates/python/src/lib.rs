//! Python bindings for `zspecial`.

use std::sync::Arc;

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use zspecial::analysis::{self, DirichletSpec};
use zspecial::digits::{self, DigitPerm};
use zspecial::json::PolyJson;
use zspecial::special::{self, DEFAULT_EXPANSION_LIMIT};
use zspecial::{BetaTuple, ComputeOptions, Error, FieldCtx, FieldElement, Method, MultiPoly};

create_exception!(zspecial_py, ZSpecialError, PyException);
create_exception!(zspecial_py, BudgetError, ZSpecialError);
create_exception!(zspecial_py, TheoremViolation, ZSpecialError);

fn to_py(e: Error) -> PyErr {
    if e.is_budget() {
        BudgetError::new_err(e.to_string())
    } else if e.is_violation() {
        TheoremViolation::new_err(e.to_string())
    } else {
        ZSpecialError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for zspecial::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn parse_method(name: &str) -> PyResult<Method> {
    match name {
        "direct" => Ok(Method::Direct),
        "via-ones" | "via_ones" => Ok(Method::ViaOnes),
        other => Err(PyValueError::new_err(format!(
            "unknown method {other:?}; use \"direct\" or \"via-ones\""
        ))),
    }
}

fn options(budget: Option<u64>, d_max: Option<u64>) -> ComputeOptions {
    let mut o = ComputeOptions::default();
    if let Some(b) = budget {
        o.budget = b;
    }
    o.d_max = d_max;
    o
}

fn json_to_py(py: Python<'_>, v: &impl serde::Serialize) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(|e| ZSpecialError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

/// The finite field `GF(p^e)` with its canonical modulus.
#[pyclass(name = "Field", frozen)]
#[derive(Clone)]
struct PyField {
    ctx: Arc<FieldCtx>,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, e = 1))]
    fn new(p: u64, e: u32) -> PyResult<Self> {
        Ok(PyField {
            ctx: zspecial::field_create(p, e).py_err()?,
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.ctx.p()
    }

    #[getter]
    fn e(&self) -> u32 {
        self.ctx.e()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.ctx.q()
    }

    #[getter]
    fn modulus(&self) -> Vec<u32> {
        self.ctx.modulus().to_vec()
    }

    fn element(&self, coords: Vec<u32>) -> PyResult<PyElem> {
        Ok(PyElem(FieldElement::new(&self.ctx, &coords).py_err()?))
    }

    fn generator(&self) -> PyElem {
        PyElem(FieldElement::from_elem(&self.ctx, self.ctx.generator()))
    }

    fn __eq__(&self, other: &PyField) -> bool {
        self.ctx.same_field(&other.ctx)
    }

    fn __repr__(&self) -> String {
        format!("Field({}, modulus={:?})", self.ctx, self.ctx.modulus())
    }
}

/// An element of a `Field`.
#[pyclass(name = "Elem", frozen)]
#[derive(Clone)]
struct PyElem(FieldElement);

#[pymethods]
impl PyElem {
    #[getter]
    fn coords(&self) -> Vec<u32> {
        self.0.coords()
    }

    fn __add__(&self, o: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(self.0.add(&o.0).py_err()?))
    }

    fn __sub__(&self, o: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(self.0.sub(&o.0).py_err()?))
    }

    fn __mul__(&self, o: &PyElem) -> PyResult<PyElem> {
        Ok(PyElem(self.0.mul(&o.0).py_err()?))
    }

    fn __neg__(&self) -> PyElem {
        PyElem(self.0.neg())
    }

    fn __pow__(&self, n: u64, _modulo: Option<u64>) -> PyElem {
        PyElem(self.0.pow(n))
    }

    fn inverse(&self) -> PyResult<PyElem> {
        Ok(PyElem(self.0.inv().py_err()?))
    }

    fn __eq__(&self, o: &PyElem) -> bool {
        self.0 == o.0
    }

    fn __repr__(&self) -> String {
        format!("Elem({:?})", self.0.coords())
    }
}

/// A polynomial in `t0, t1, …` over a finite field.
#[pyclass(name = "Poly", frozen)]
#[derive(Clone)]
struct PyPoly(MultiPoly);

#[pymethods]
impl PyPoly {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyPoly> {
        Ok(PyPoly(zspecial::json::poly_from_json(text).py_err()?))
    }

    fn to_json(&self) -> String {
        zspecial::json::poly_to_json(&self.0)
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.0.num_vars()
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField {
            ctx: self.0.ctx().clone(),
        }
    }

    /// `(exponents, coordinates)` for every nonzero term.
    fn terms(&self) -> Vec<(Vec<u64>, Vec<u32>)> {
        PolyJson::of(&self.0)
            .terms
            .into_iter()
            .map(|t| (t.exp, t.coeff))
            .collect()
    }

    fn degree_t0(&self) -> Option<u64> {
        self.0.degree_in_t0()
    }

    fn degree_in(&self, var: usize) -> Option<u64> {
        self.0.degree_in(var)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The polynomial with `t0` set to the given field element.
    fn at_t0(&self, c: &PyElem) -> PyResult<PyPoly> {
        self.0.ctx().check_same(c.0.ctx()).py_err()?;
        Ok(PyPoly(self.0.evaluate_t0(c.0.value())))
    }

    fn multiplicity_at_t0(&self, c: &PyElem) -> PyResult<u64> {
        self.0.ctx().check_same(c.0.ctx()).py_err()?;
        self.0.multiplicity_at_t0(c.0.value()).py_err()
    }

    /// Raises every coefficient to the power `p^i`.
    fn frobenius(&self, i: u32) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.frobenius(i).py_err()?))
    }

    fn __add__(&self, o: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.add(&o.0).py_err()?))
    }

    fn __sub__(&self, o: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.sub(&o.0).py_err()?))
    }

    fn __mul__(&self, o: &PyPoly) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.mul(&o.0).py_err()?))
    }

    fn __pow__(&self, n: u64, _modulo: Option<u64>) -> PyResult<PyPoly> {
        Ok(PyPoly(self.0.pow(n).py_err()?))
    }

    fn __eq__(&self, o: &PyPoly) -> bool {
        self.0 == o.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({})", self.0)
    }
}

/// A computed `z(β, t0)` and how it was obtained.
#[pyclass(name = "SpecialPoly", frozen)]
struct PySpecial(zspecial::SpecialPoly);

#[pymethods]
impl PySpecial {
    #[getter]
    fn poly(&self) -> PyPoly {
        PyPoly(self.0.poly.clone())
    }

    #[getter]
    fn provenance(&self) -> String {
        self.0.provenance.to_string()
    }

    #[getter]
    fn betas(&self) -> Vec<u64> {
        self.0.betas.0.clone()
    }

    fn degree(&self) -> Option<u64> {
        self.0.degree()
    }

    fn __repr__(&self) -> String {
        format!("SpecialPoly[{}]({})", self.0.provenance, self.0.poly)
    }
}

#[pyfunction]
#[pyo3(signature = (field, betas, d_max = None, budget = None))]
fn z_direct(field: &PyField, betas: Vec<u64>, d_max: Option<u64>, budget: Option<u64>) -> PyResult<PySpecial> {
    let z = special::z_direct(&BetaTuple(betas), &field.ctx, &options(budget, d_max)).py_err()?;
    Ok(PySpecial(z))
}

#[pyfunction]
#[pyo3(signature = (field, betas, method = "direct", budget = None))]
fn z_general(field: &PyField, betas: Vec<u64>, method: &str, budget: Option<u64>) -> PyResult<PySpecial> {
    let m = parse_method(method)?;
    let z = special::z_general(&BetaTuple(betas), &field.ctx, m, &options(budget, None)).py_err()?;
    Ok(PySpecial(z))
}

#[pyfunction]
fn z_via_ones(field: &PyField, betas: Vec<u64>) -> PyResult<PySpecial> {
    z_general(field, betas, "via-ones", None)
}

#[pyfunction]
#[pyo3(signature = (field, s, expansion_limit = DEFAULT_EXPANSION_LIMIT))]
fn z_recursive_ones(field: &PyField, s: usize, expansion_limit: u64) -> PyResult<PySpecial> {
    Ok(PySpecial(special::z_recursive_ones(s, &field.ctx, expansion_limit).py_err()?))
}

#[pyfunction]
fn phi_degree(field: &PyField, betas: Vec<u64>) -> u64 {
    special::phi_degree(&BetaTuple(betas), &field.ctx)
}

#[pyfunction]
fn sheats_degree(field: &PyField, beta: BigUint) -> u64 {
    analysis::sheats_degree(&beta, &field.ctx)
}

#[pyfunction]
fn digits_base_q(n: BigUint, q: u64) -> PyResult<Vec<u64>> {
    Ok(digits::digits_base_q(&n, q).py_err()?.digits().to_vec())
}

#[pyfunction]
fn length_l(n: BigUint, q: u64) -> PyResult<u64> {
    digits::length_l(&n, q).py_err()
}

#[pyfunction]
fn carry_free(j: BigUint, k: BigUint, q: u64) -> PyResult<bool> {
    digits::carry_free(&j, &k, q).py_err()
}

/// Applies a digit permutation written as `"0:1,1:0"` (or `"id"`).
#[pyfunction]
fn perm_apply(perm: &str, n: BigUint, q: u64) -> PyResult<BigUint> {
    let perm: DigitPerm = perm.parse().py_err()?;
    digits::perm_apply(&perm, &n, q).py_err()
}

#[pyfunction]
#[pyo3(signature = (field, betas, method = "direct", budget = None))]
fn trivial_zero_report(
    py: Python<'_>,
    field: &PyField,
    betas: Vec<u64>,
    method: &str,
    budget: Option<u64>,
) -> PyResult<PyObject> {
    let m = parse_method(method)?;
    let r = analysis::trivial_zero_report(&BetaTuple(betas), &field.ctx, m, &options(budget, None)).py_err()?;
    json_to_py(py, &r.row())
}

#[pyfunction]
fn witness<'py>(py: Python<'py>, field: &PyField, betas: Vec<u64>) -> PyResult<Bound<'py, PyDict>> {
    let w = special::witness_specialization(&BetaTuple(betas), &field.ctx).py_err()?;
    let d = PyDict::new_bound(py);
    d.set_item("ms", w.ms)?;
    d.set_item("B", w.big_b)?;
    Ok(d)
}

/// Checks `z(β, t0)^{p^i} = z(p^i β, t0^{p^i})`.
#[pyfunction]
#[pyo3(signature = (field, betas, i, method = "via-ones", budget = None))]
fn twist(field: &PyField, betas: Vec<u64>, i: u32, method: &str, budget: Option<u64>) -> PyResult<bool> {
    let m = parse_method(method)?;
    let r = special::frobenius_twist_check(&BetaTuple(betas), i, &field.ctx, m, &options(budget, None)).py_err()?;
    Ok(r.holds)
}

/// Specializes `t_i ↦ λ_i` with each `λ_i` given by coordinates in `GF(q^m)`.
#[pyfunction]
#[pyo3(signature = (field, m, lambdas, betas, beta, budget = None))]
fn dirichlet<'py>(
    py: Python<'py>,
    field: &PyField,
    m: u32,
    lambdas: Vec<Vec<u32>>,
    betas: Vec<u64>,
    beta: u64,
    budget: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = DirichletSpec::new(&field.ctx, m, &lambdas, BetaTuple(betas), beta).py_err()?;
    let r = analysis::dirichlet_specialize(&spec, &field.ctx, &options(budget, None)).py_err()?;
    let d = PyDict::new_bound(py);
    d.set_item("phi", r.phi)?;
    d.set_item("degree", r.degree)?;
    d.set_item("multiplicity_at_one", r.multiplicity_at_one)?;
    d.set_item("predicted_zero", r.predicted_zero)?;
    d.set_item("paths_agree", r.paths_agree)?;
    d.set_item("poly", PyPoly(r.poly).into_py(py))?;
    Ok(d)
}

#[pymodule]
pub fn zspecial_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("ZSpecialError", py.get_type_bound::<ZSpecialError>())?;
    m.add("BudgetError", py.get_type_bound::<BudgetError>())?;
    m.add("TheoremViolation", py.get_type_bound::<TheoremViolation>())?;
    m.add_class::<PyField>()?;
    m.add_class::<PyElem>()?;
    m.add_class::<PyPoly>()?;
    m.add_class::<PySpecial>()?;
    m.add_function(wrap_pyfunction!(z_direct, m)?)?;
    m.add_function(wrap_pyfunction!(z_general, m)?)?;
    m.add_function(wrap_pyfunction!(z_via_ones, m)?)?;
    m.add_function(wrap_pyfunction!(z_recursive_ones, m)?)?;
    m.add_function(wrap_pyfunction!(phi_degree, m)?)?;
    m.add_function(wrap_pyfunction!(sheats_degree, m)?)?;
    m.add_function(wrap_pyfunction!(digits_base_q, m)?)?;
    m.add_function(wrap_pyfunction!(length_l, m)?)?;
    m.add_function(wrap_pyfunction!(carry_free, m)?)?;
    m.add_function(wrap_pyfunction!(perm_apply, m)?)?;
    m.add_function(wrap_pyfunction!(trivial_zero_report, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(twist, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet, m)?)?;
    Ok(())
}
