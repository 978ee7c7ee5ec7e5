//! Python module `cocomp_py`.
//!
//! Subspaces are built from spanning vectors (lists of floats). Reports come
//! back as plain dicts and lists with the same layout as the CLI's JSON.

use cocomp::relpos;
use cocomp::truncated::{self, ExampleName, ShiftWindow};
use cocomp::witness;
use cocomp::{Error, Matrix, Subspace, TolerancePolicy};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

create_exception!(cocomp_py, CocompError, PyException);
create_exception!(cocomp_py, PreconditionError, CocompError);
create_exception!(cocomp_py, NumericalError, CocompError);
create_exception!(cocomp_py, NoComplementError, CocompError);
create_exception!(cocomp_py, InvalidCertificateError, CocompError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Input(_) => PyValueError::new_err(msg),
        Error::Precondition(_) => PreconditionError::new_err(msg),
        Error::Numerical(_) => NumericalError::new_err(msg),
        Error::NoComplement(_) => NoComplementError::new_err(msg),
        Error::InvalidCertificate(_) | Error::InvalidInvolution(_) => InvalidCertificateError::new_err(msg),
    }
}

fn tolerances(profile: Option<&str>) -> PyResult<TolerancePolicy> {
    match profile {
        Some(p) => TolerancePolicy::profile(p).map_err(py_err),
        None => Ok(TolerancePolicy::default()),
    }
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(value_to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, value_to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| NumericalError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

fn square(rows: Vec<Vec<f64>>) -> PyResult<Matrix> {
    Matrix::from_rows(&rows).map_err(py_err)
}

/// Subspace of `R^n`, stored with an orthonormal basis.
#[pyclass(name = "Subspace", module = "cocomp_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySubspace {
    inner: Subspace,
}

#[pymethods]
impl PySubspace {
    /// Span of `vectors`; `ambient_dim` is needed only when the list is empty.
    #[new]
    #[pyo3(signature = (vectors, ambient_dim=None, profile=None))]
    fn new(vectors: Vec<Vec<f64>>, ambient_dim: Option<usize>, profile: Option<&str>) -> PyResult<Self> {
        let n = match (ambient_dim, vectors.first()) {
            (Some(n), _) => n,
            (None, Some(v)) => v.len(),
            (None, None) => {
                return Err(PyValueError::new_err(
                    "ambient_dim is required for an empty spanning set",
                ))
            }
        };
        let inner = Subspace::from_spanning(&vectors, n, &tolerances(profile)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    /// Orthonormal basis vectors.
    #[getter]
    fn basis(&self) -> Vec<Vec<f64>> {
        self.inner.basis().transpose().to_rows()
    }

    fn orthocomplement(&self) -> Self {
        Self {
            inner: self.inner.orthocomplement(),
        }
    }

    #[pyo3(signature = (other, profile=None))]
    fn intersect(&self, other: &PySubspace, profile: Option<&str>) -> PyResult<Self> {
        let inner = self
            .inner
            .intersect(&other.inner, &tolerances(profile)?)
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[pyo3(signature = (other, profile=None))]
    fn sum(&self, other: &PySubspace, profile: Option<&str>) -> PyResult<Self> {
        let inner = self.inner.sum(&other.inner, &tolerances(profile)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[pyo3(signature = (x, profile=None))]
    fn contains(&self, x: Vec<f64>, profile: Option<&str>) -> PyResult<bool> {
        self.inner.contains(&x, &tolerances(profile)?).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Subspace(dim={}, ambient_dim={})",
            self.inner.dim(),
            self.inner.ambient_dim()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (m, n, profile=None))]
fn classify<'py>(
    py: Python<'py>,
    m: &PySubspace,
    n: &PySubspace,
    profile: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    report(
        py,
        &relpos::classify(&m.inner, &n.inner, &tolerances(profile)?).map_err(py_err)?,
    )
}

#[pyfunction]
fn principal_angles(m: &PySubspace, n: &PySubspace) -> PyResult<Vec<f64>> {
    relpos::principal_angles(&m.inner, &n.inner).map_err(py_err)
}

/// `(decision, checks)`: whether a common complement exists, with the cross-checks.
#[pyfunction]
#[pyo3(signature = (m, n, epsilon=None, profile=None))]
fn decide<'py>(
    py: Python<'py>,
    m: &PySubspace,
    n: &PySubspace,
    epsilon: Option<f64>,
    profile: Option<&str>,
) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let (d, checks) =
        relpos::has_common_complement(&m.inner, &n.inner, epsilon, &tolerances(profile)?).map_err(py_err)?;
    Ok((d, report(py, &checks)?))
}

/// `(K, certificate)`.
#[pyfunction]
#[pyo3(signature = (m, n, profile=None))]
fn common_complement<'py>(
    py: Python<'py>,
    m: &PySubspace,
    n: &PySubspace,
    profile: Option<&str>,
) -> PyResult<(PySubspace, Bound<'py, PyAny>)> {
    let cert = witness::common_complement(&m.inner, &n.inner, &tolerances(profile)?).map_err(py_err)?;
    Ok((PySubspace { inner: cert.k.clone() }, report(py, &cert)?))
}

#[pyfunction]
#[pyo3(signature = (m, n, k, profile=None))]
fn verify_common_complement<'py>(
    py: Python<'py>,
    m: &PySubspace,
    n: &PySubspace,
    k: &PySubspace,
    profile: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let cert =
        witness::verify_common_complement(&m.inner, &n.inner, &k.inner, &tolerances(profile)?).map_err(py_err)?;
    report(py, &cert)
}

/// Involution exchanging `m` and `n`; the result dict carries `S` under `"s"`.
#[pyfunction]
#[pyo3(signature = (m, n, profile=None))]
fn involution<'py>(
    py: Python<'py>,
    m: &PySubspace,
    n: &PySubspace,
    profile: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    report(
        py,
        &witness::involution_for_pair(&m.inner, &n.inner, &tolerances(profile)?).map_err(py_err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (m, n, s, profile=None))]
fn complement_from_involution(
    m: &PySubspace,
    n: &PySubspace,
    s: Vec<Vec<f64>>,
    profile: Option<&str>,
) -> PyResult<PySubspace> {
    let cert =
        witness::complement_from_involution(&m.inner, &n.inner, &square(s)?, &tolerances(profile)?).map_err(py_err)?;
    Ok(PySubspace { inner: cert.k })
}

#[pyfunction]
#[pyo3(signature = (m, n, profile=None))]
fn exchanging_symmetry(m: &PySubspace, n: &PySubspace, profile: Option<&str>) -> PyResult<Vec<Vec<f64>>> {
    let s = witness::exchanging_symmetry(&m.inner, &n.inner, &tolerances(profile)?).map_err(py_err)?;
    Ok(s.to_rows())
}

/// Finite truncation of a built-in example: `"nonclosed-sum"`, `"shift-triple"`
/// or `"hexagonal"`.
#[pyfunction]
#[pyo3(signature = (name, level=1, variant="symmetric", profile=None))]
fn example<'py>(
    py: Python<'py>,
    name: &str,
    level: usize,
    variant: &str,
    profile: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let name: ExampleName = name.parse().map_err(py_err)?;
    let window: ShiftWindow = variant.parse().map_err(py_err)?;
    report(
        py,
        &truncated::build(name, level, window, &tolerances(profile)?).map_err(py_err)?,
    )
}

#[pymodule]
fn cocomp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PySubspace>()?;
    m.add("CocompError", py.get_type::<CocompError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("NoComplementError", py.get_type::<NoComplementError>())?;
    m.add("InvalidCertificateError", py.get_type::<InvalidCertificateError>())?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(principal_angles, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(common_complement, m)?)?;
    m.add_function(wrap_pyfunction!(verify_common_complement, m)?)?;
    m.add_function(wrap_pyfunction!(involution, m)?)?;
    m.add_function(wrap_pyfunction!(complement_from_involution, m)?)?;
    m.add_function(wrap_pyfunction!(exchanging_symmetry, m)?)?;
    m.add_function(wrap_pyfunction!(example, m)?)?;
    Ok(())
}
