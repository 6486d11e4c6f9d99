//! Python bindings. Tensors and ABPs cross the boundary as objects that
//! convert to and from the library's canonical JSON.

use abplab::json::{
    abp_from_json, abp_to_json, certificate_to_json, dim_report_to_json, parse, tensor_from_json, tensor_to_json,
    to_canonical_string,
};
use abplab::{concise, family, flow, nisan, tangent, Format, RationalTensor};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn format_of(widths: Vec<usize>) -> PyResult<Format> {
    Format::new(widths).map_err(err)
}

/// Exact noncommutative polynomial over rationals, stored as a sparse tensor.
#[pyclass(name = "Tensor", module = "abplab", frozen)]
struct PyTensor {
    inner: RationalTensor,
}

#[pymethods]
impl PyTensor {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = tensor_from_json(&parse(text).map_err(err)?).map_err(err)?;
        Ok(PyTensor { inner })
    }

    fn to_json(&self) -> String {
        to_canonical_string(&tensor_to_json(&self.inner))
    }

    #[getter]
    fn alphabet_sizes(&self) -> Vec<usize> {
        self.inner.alphabet_sizes().to_vec()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &PyTensor) -> bool {
        self.inner.tensor_equal(&other.inner).unwrap_or(false)
    }

    fn __repr__(&self) -> String {
        format!("Tensor(alphabet_sizes={:?}, terms={})", self.inner.alphabet_sizes(), self.inner.len())
    }
}

/// Algebraic branching program with exact (possibly ε-dependent) labels.
#[pyclass(name = "Abp", module = "abplab", frozen)]
struct PyAbp {
    inner: abplab::Abp,
}

#[pymethods]
impl PyAbp {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = abp_from_json(&parse(text).map_err(err)?).map_err(err)?;
        Ok(PyAbp { inner })
    }

    fn to_json(&self) -> String {
        to_canonical_string(&abp_to_json(&self.inner))
    }

    #[getter]
    fn format(&self) -> Vec<usize> {
        self.inner.format.widths().to_vec()
    }

    #[getter]
    fn layer_sizes(&self) -> Vec<usize> {
        self.inner.layer_sizes()
    }

    /// The computed polynomial; raises if it still depends on ε.
    fn evaluate(&self) -> PyResult<PyTensor> {
        let t = self.inner.evaluate().map_err(err)?;
        let inner = t.to_rational().ok_or_else(|| err("evaluation depends on ε; use evaluate_json"))?;
        Ok(PyTensor { inner })
    }

    /// The computed polynomial as JSON, with Laurent coefficients when ε is present.
    fn evaluate_json(&self) -> PyResult<String> {
        Ok(to_canonical_string(&tensor_to_json(&self.inner.evaluate().map_err(err)?)))
    }

    fn __repr__(&self) -> String {
        format!("Abp(format={:?})", self.inner.format.widths())
    }
}

#[pyfunction]
fn f_com(format: Vec<usize>) -> PyResult<PyTensor> {
    Ok(PyTensor { inner: family::f_com(&format_of(format)?) })
}

#[pyfunction]
fn f0(format: Vec<usize>) -> PyResult<PyTensor> {
    Ok(PyTensor { inner: family::f0(&format_of(format)?).map_err(err)? })
}

#[pyfunction]
fn gamma_com(format: Vec<usize>) -> PyResult<PyAbp> {
    Ok(PyAbp { inner: family::gamma_com(&format_of(format)?) })
}

#[pyfunction]
fn gamma_prime(m: usize, d: usize) -> PyResult<PyAbp> {
    Ok(PyAbp { inner: family::gamma_prime(m, d).map_err(err)? })
}

/// Ranks of the prefix/suffix flattenings r_0..r_d.
#[pyfunction]
fn width_profile(f: &PyTensor) -> PyResult<Vec<usize>> {
    Ok(nisan::width_profile(&f.inner).map_err(err)?.ranks)
}

#[pyfunction]
fn minimize(f: &PyTensor) -> PyResult<PyAbp> {
    Ok(PyAbp { inner: nisan::minimize(&f.inner).map_err(err)? })
}

#[pyfunction]
fn deborder(abp: &PyAbp) -> PyResult<PyAbp> {
    Ok(PyAbp { inner: abplab::deborder::deborder(&abp.inner).map_err(err)? })
}

/// `(concise, mode_ranks)`.
#[pyfunction]
fn is_concise(f: &PyTensor) -> (bool, Vec<usize>) {
    let r = concise::is_concise(&f.inner);
    (r.concise, r.mode_ranks)
}

/// `(g0, g1, g2)` piece dimensions over the edge alphabets of `format`.
#[pyfunction]
fn tangent_dims(f: &PyTensor, format: Vec<usize>) -> PyResult<(usize, usize, usize)> {
    let d = tangent::tangent_dim(&f.inner, &format_of(format)?).map_err(err)?;
    Ok((d.g0, d.g1, d.g2))
}

#[pyfunction]
fn certify_separation(format: Vec<usize>) -> PyResult<String> {
    let c = tangent::certify_separation(&format_of(format)?).map_err(err)?;
    Ok(to_canonical_string(&certificate_to_json(&c)))
}

#[pyfunction]
fn flow_verify(format: Vec<usize>) -> PyResult<String> {
    let r = flow::verify_dim_theorems(&format_of(format)?).map_err(err)?;
    Ok(to_canonical_string(&dim_report_to_json(&r)))
}

#[pymodule(name = "abplab")]
fn abplab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor>()?;
    m.add_class::<PyAbp>()?;
    m.add_function(wrap_pyfunction!(f_com, m)?)?;
    m.add_function(wrap_pyfunction!(f0, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_com, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_prime, m)?)?;
    m.add_function(wrap_pyfunction!(width_profile, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(deborder, m)?)?;
    m.add_function(wrap_pyfunction!(is_concise, m)?)?;
    m.add_function(wrap_pyfunction!(tangent_dims, m)?)?;
    m.add_function(wrap_pyfunction!(certify_separation, m)?)?;
    m.add_function(wrap_pyfunction!(flow_verify, m)?)?;
    Ok(())
}
