use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use scong::cones::Cone;
use scong::io::{self, CongruenceInput};
use scong::lattice::{QmodZ, RootSelector, SmallestNumerator, SmallestRoot};
use scong::scong_toric::{self as st, ChainBounds, FCongruence, Term, ToricContext};
use scong::toric_scheme::{global_dim as scheme_dim, FanScheme};

create_exception!(scong_py, ScongError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    ScongError::new_err(e.to_string())
}

fn to_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn angle(s: &str) -> PyResult<QmodZ> {
    s.parse().map_err(|_| err(format!("bad angle {s:?}")))
}

fn loads<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn selector(name: &str) -> PyResult<&'static dyn RootSelector> {
    match name {
        "default" => Ok(&SmallestNumerator),
        "smallest" => Ok(&SmallestRoot),
        _ => Err(err(format!("unknown root selector {name:?}"))),
    }
}

/// The affine monoid `sigma^vee ∩ M` of a rational cone `sigma`.
#[pyclass(name = "ToricMonoid", module = "scong_py", frozen)]
struct PyContext(Arc<ToricContext>);

#[pymethods]
impl PyContext {
    #[new]
    #[pyo3(signature = (rank, generators))]
    fn new(rank: usize, generators: Vec<Vec<i64>>) -> PyResult<Self> {
        let g: Vec<_> = generators.iter().map(|x| to_vec(x)).collect();
        let sigma = Cone::new(rank, &g).map_err(err)?;
        ToricContext::new(sigma).map(PyContext).map_err(err)
    }

    #[staticmethod]
    fn orthant(rank: usize) -> Self {
        PyContext(ToricContext::orthant(rank))
    }

    #[staticmethod]
    fn torus(rank: usize) -> Self {
        PyContext(ToricContext::torus(rank))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn hilbert_basis(&self) -> Vec<Vec<BigInt>> {
        self.0.hilbert().to_vec()
    }

    fn face_count(&self) -> usize {
        self.0.face_count()
    }

    /// Krull dimension together with a longest chain realising it.
    fn krull_dim(&self) -> PyResult<(usize, Vec<PyCongruence>)> {
        let (d, chain) = st::krull_dim(&self.0).map_err(err)?;
        Ok((d, chain.into_iter().map(PyCongruence).collect()))
    }

    fn trivial(&self) -> PyCongruence {
        PyCongruence(FCongruence::trivial(&self.0))
    }

    /// The strong congruence with data `(tau, H, chi)`; `chi` takes its values on `h`.
    fn congruence(&self, tau: usize, h: Vec<Vec<i64>>, chi: Vec<String>) -> PyResult<PyCongruence> {
        if h.len() != chi.len() {
            return Err(err("h and chi must have the same length"));
        }
        let gens: Vec<_> = h.iter().map(|x| to_vec(x)).collect();
        let vals = chi.iter().map(|s| angle(s)).collect::<PyResult<Vec<_>>>()?;
        st::congruence_from_generators(&self.0, tau, &gens, &vals)
            .map(PyCongruence)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "ToricMonoid(rank={}, hilbert_basis={:?})",
            self.0.rank(),
            self.0.hilbert()
        )
    }
}

/// A strong congruence in canonical form.
#[pyclass(name = "Congruence", module = "scong_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCongruence(FCongruence);

#[pymethods]
impl PyCongruence {
    /// Reads the JSON congruence format; a canonical form is returned as is, relations
    /// must classify as strong.
    #[staticmethod]
    #[pyo3(signature = (text, fan=None))]
    fn from_json(text: &str, fan: Option<&str>) -> PyResult<Self> {
        let fan = fan.map(io::parse_fan).transpose().map_err(err)?;
        match io::parse_congruence(text, fan.as_ref()).map_err(err)? {
            CongruenceInput::Canonical(c) => Ok(PyCongruence(c)),
            CongruenceInput::Relations(p) => {
                let v = io::classify(&p).map_err(err)?;
                v.congruence()
                    .cloned()
                    .map(PyCongruence)
                    .ok_or_else(|| err(format!("not strong: {}", v.verdict())))
            }
        }
    }

    #[getter]
    fn tau(&self) -> usize {
        self.0.tau()
    }

    #[getter]
    fn h(&self) -> Vec<Vec<BigInt>> {
        self.0.h().basis_rows()
    }

    #[getter]
    fn chi(&self) -> Vec<String> {
        self.0.chi().values().iter().map(|v| v.to_string()).collect()
    }

    fn height(&self) -> usize {
        st::height(&self.0)
    }

    fn height_n(&self) -> usize {
        st::height_n(&self.0)
    }

    fn height_t(&self) -> usize {
        st::height_t(&self.0)
    }

    /// Whether `lam * x^a ~ mu * x^b`; angles are strings such as "1/3".
    #[pyo3(signature = (a, b, lam="0", mu="0"))]
    fn member(&self, a: Vec<i64>, b: Vec<i64>, lam: &str, mu: &str) -> PyResult<bool> {
        let s = Term::mono(angle(lam)?, to_vec(&a));
        let t = Term::mono(angle(mu)?, to_vec(&b));
        st::member(&self.0, &s, &t).map_err(err)
    }

    /// Whether `self ⊆ other` as relations.
    fn contains(&self, other: &PyCongruence) -> PyResult<bool> {
        st::contains(&self.0, &other.0).map_err(err)
    }

    #[pyo3(signature = (other, selector="default"))]
    fn chain_to(&self, other: &PyCongruence, selector: &str) -> PyResult<Vec<PyCongruence>> {
        let sel = self::selector(selector)?;
        let chain = st::saturated_chain_with(&self.0, &other.0, sel).map_err(err)?;
        Ok(chain.into_iter().map(PyCongruence).collect())
    }

    /// Number of saturated chains to `other` with all angles of denominator at most `denom`.
    fn count_chains(&self, other: &PyCongruence, denom: u64) -> PyResult<usize> {
        st::enumerate_saturated_chains(&self.0, &other.0, ChainBounds::new(denom))
            .map(|c| c.len())
            .map_err(err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        loads(py, &io::congruence_to_json(&self.0))
    }

    fn __eq__(&self, other: &PyCongruence) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "Congruence(tau={}, h={:?}, chi={:?})",
            self.0.tau(),
            self.h(),
            self.chi()
        )
    }
}

/// Classifies a congruence file given by relations; returns a dict with the verdict.
#[pyfunction]
#[pyo3(signature = (text, fan=None))]
fn classify<'py>(py: Python<'py>, text: &str, fan: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let fan = fan.map(io::parse_fan).transpose().map_err(err)?;
    match io::parse_congruence(text, fan.as_ref()).map_err(err)? {
        CongruenceInput::Relations(p) => loads(py, &io::classification_to_json(&io::classify(&p).map_err(err)?)),
        CongruenceInput::Canonical(_) => Err(err("classify needs relations")),
    }
}

/// Krull dimension of the scheme of a fan given as JSON.
#[pyfunction]
fn global_dim(fan: &str) -> PyResult<usize> {
    let fs = FanScheme::new(io::parse_fan(fan).map_err(err)?).map_err(err)?;
    scheme_dim(&fs).map(|d| d.dim).map_err(err)
}

/// Whether a finite monoid given as JSON is a domain.
#[pyfunction]
fn is_domain(monoid: &str) -> PyResult<bool> {
    Ok(io::parse_monoid(monoid).map_err(err)?.is_domain())
}

/// Whether a finite monoid given as JSON is integral.
#[pyfunction]
fn is_integral(monoid: &str) -> PyResult<bool> {
    Ok(io::parse_monoid(monoid).map_err(err)?.is_integral())
}

#[pymodule]
fn scong_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ScongError", m.py().get_type::<ScongError>())?;
    m.add_class::<PyContext>()?;
    m.add_class::<PyCongruence>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(global_dim, m)?)?;
    m.add_function(wrap_pyfunction!(is_domain, m)?)?;
    m.add_function(wrap_pyfunction!(is_integral, m)?)?;
    Ok(())
}
