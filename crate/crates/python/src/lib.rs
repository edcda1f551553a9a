//! Python bindings for spherekern.
//!
//! Reports come back as plain dicts (parsed from the JSON form of the Rust
//! reports). Kernels are addressed by name: `dot`, `neg-dot`, `gegenbauer:K`,
//! `const[:V]`, `coord`, `bundle`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

use spherekern::catalog::named_kernel;
use spherekern::expansion::{
    musin_coeffs, schoenberg_coeffs, synth_bundle_kernel, synth_schoenberg, BundleExpansion, BundleKernel,
    ScalarExpansion as CoreScalar, SchoenbergKernel,
};
use spherekern::gegenbauer::{self, GegenbauerBasis};
use spherekern::kernel::{self, Kernel};
use spherekern::lp_bound::{self as lp, LPBoundProblem, LPCertificate};
use spherekern::sphere;
use spherekern::{addition, Error};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_dict(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let text: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `P_d^alpha(t)`.
#[pyfunction]
fn eval_gegenbauer(alpha: f64, d: usize, t: f64) -> PyResult<f64> {
    gegenbauer::eval_gegenbauer(alpha, d, t).map_err(err)
}

/// Squared weighted norm of `P_k^alpha`.
#[pyfunction]
fn gegenbauer_norm(alpha: f64, k: usize) -> PyResult<f64> {
    gegenbauer::gegenbauer_norm(alpha, k).map_err(err)
}

/// Gegenbauer coefficients of a Python callable `f(t)` on `[-1, 1]`.
#[pyfunction]
fn expand_profile(f: &Bound<'_, PyAny>, alpha: f64, d_max: usize) -> PyResult<Vec<f64>> {
    let basis = GegenbauerBasis::new(alpha, d_max).map_err(err)?;
    let samples = basis
        .quad
        .nodes
        .iter()
        .map(|&t| f.call1((t,))?.extract::<f64>())
        .collect::<PyResult<Vec<f64>>>()?;
    Ok(basis.expand_samples(&samples))
}

/// Schoenberg coefficients of a named sphere kernel.
#[pyfunction]
#[pyo3(signature = (kernel, n, d_max = 16))]
fn expand(py: Python<'_>, kernel: &str, n: usize, d_max: usize) -> PyResult<Vec<f64>> {
    let k = named_kernel(kernel, n, 0, false, 0).map_err(err)?;
    py.detach(|| schoenberg_coeffs(&k, d_max))
        .map(|e| e.coefficients)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (kernel, n, r = 0, trials = 10, points = 30, seed = 0, tol = kernel::DEFAULT_PD_TOL))]
#[allow(clippy::too_many_arguments)]
fn check_pd<'py>(
    py: Python<'py>,
    kernel: &str,
    n: usize,
    r: usize,
    trials: usize,
    points: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let k = named_kernel(kernel, n, r, true, seed).map_err(err)?;
    let rep = py
        .detach(|| kernel::check_pd(&k, trials, points, seed, tol))
        .map_err(err)?;
    to_dict(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (kernel, n, r = 0, draws = 200, seed = 0, tol = 1e-9))]
fn check_invariance<'py>(
    py: Python<'py>,
    kernel: &str,
    n: usize,
    r: usize,
    draws: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let k = named_kernel(kernel, n, r, true, seed).map_err(err)?;
    let rep = py
        .detach(|| kernel::check_invariance(&k, draws, seed, tol))
        .map_err(err)?;
    to_dict(py, &rep)
}

#[pyfunction]
fn addition_constants(alpha: f64, k: usize) -> PyResult<Vec<f64>> {
    addition::addition_constants(alpha, k).map(|c| c.c).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, r, k, samples = 200, seed = 0, tol = 1e-8))]
fn verify_addition<'py>(
    py: Python<'py>,
    n: usize,
    r: usize,
    k: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = py
        .detach(|| addition::verify_addition(n, r, k, samples, seed, tol))
        .map_err(err)?;
    to_dict(py, &rep)
}

/// Delsarte LP certificate for codes on `S^{n-1}` with minimum angle `theta` (radians).
#[pyfunction]
#[pyo3(signature = (n, theta, d_max = 12))]
fn lp_bound<'py>(py: Python<'py>, n: usize, theta: f64, d_max: usize) -> PyResult<Bound<'py, PyAny>> {
    let cert = py
        .detach(|| LPBoundProblem::new(n, theta, d_max).and_then(|p| lp::delsarte_lp(&p)))
        .map_err(err)?;
    to_dict(py, &cert)
}

/// Margin report for a certificate dict as returned by [`lp_bound`].
#[pyfunction]
#[pyo3(signature = (certificate, refine = lp::CERTIFY_REFINE))]
fn certify<'py>(py: Python<'py>, certificate: &Bound<'py, PyAny>, refine: usize) -> PyResult<Bound<'py, PyAny>> {
    let cert: LPCertificate = serde_json::from_value(from_dict(py, certificate)?)
        .map_err(|e| PyValueError::new_err(format!("not a certificate: {e}")))?;
    let p = LPBoundProblem::new(cert.n, cert.theta, cert.d_max).map_err(err)?;
    to_dict(py, &lp::certify(&cert, &p, refine))
}

/// Base configuration `Z`, given as a list of unit columns.
#[pyclass(name = "SphereConfig", frozen)]
struct PySphereConfig {
    inner: sphere::SphereConfig,
}

#[pymethods]
impl PySphereConfig {
    #[new]
    fn new(n: usize, columns: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: sphere::SphereConfig::from_columns(n, &columns).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, r, seed = 0))]
    fn random(n: usize, r: usize, seed: u64) -> PyResult<Self> {
        let mut rng = sphere::rng_from_seed(seed);
        Ok(Self {
            inner: sphere::SphereConfig::random_full_rank(n, r, &mut rng).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    fn columns(&self) -> Vec<Vec<f64>> {
        self.inner
            .z()
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    fn gram(&self) -> Vec<Vec<f64>> {
        let g = self.inner.gram();
        g.row_iter().map(|row| row.iter().copied().collect()).collect()
    }

    fn coordinates(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.coordinates(&x).map_err(err)
    }

    fn inner_z(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.inner.inner_z(&x, &y).map_err(err)
    }

    fn map_t1(&self, v: Vec<f64>, u: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.map_t1(&v, &u).map_err(err)
    }

    fn map_t2(&self, x: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        self.inner.map_t2(&x).map_err(err)
    }

    /// Coefficient kernels `d_k(Zᵀx, Zᵀy)` of a named kernel, via the transport map.
    #[pyo3(signature = (kernel, u1, u2, d_max = 16))]
    fn musin_coefficients(&self, kernel: &str, u1: Vec<f64>, u2: Vec<f64>, d_max: usize) -> PyResult<Vec<f64>> {
        let k = named_kernel(kernel, self.inner.n(), self.inner.r(), false, 0).map_err(err)?;
        let m = musin_coeffs(&k, &self.inner, d_max).map_err(err)?;
        m.coefficients(&u1, &u2).map_err(err)
    }
}

/// Zonal kernel `Σ c_k P_k^{n/2-1}(xᵀy)`.
#[pyclass(name = "ScalarExpansion", frozen)]
struct PyScalarExpansion {
    kernel: SchoenbergKernel,
}

#[pymethods]
impl PyScalarExpansion {
    #[new]
    fn new(n: usize, coefficients: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            kernel: synth_schoenberg(CoreScalar::new(n, coefficients).map_err(err)?),
        })
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.kernel.expansion().coefficients.clone()
    }

    fn profile(&self, t: f64) -> f64 {
        self.kernel.profile(t)
    }

    fn eval(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.kernel.eval(&x, &y, None).map_err(err)
    }

    #[pyo3(signature = (tol = kernel::DEFAULT_PD_TOL))]
    fn is_positive_definite(&self, tol: f64) -> bool {
        self.kernel.expansion().is_positive_definite(tol)
    }
}

/// Bundle kernel synthesized from random quadratic feature maps.
#[pyclass(name = "BundleKernel", frozen)]
struct PyBundleKernel {
    kernel: BundleKernel,
}

#[pymethods]
impl PyBundleKernel {
    #[staticmethod]
    #[pyo3(signature = (n, r, d_max = 4, features = 3, seed = 0))]
    fn random(n: usize, r: usize, d_max: usize, features: usize, seed: u64) -> PyResult<Self> {
        let e = BundleExpansion::random(n, r, d_max, features, seed).map_err(err)?;
        Ok(Self {
            kernel: synth_bundle_kernel(e).map_err(err)?,
        })
    }

    fn eval(&self, x: Vec<f64>, y: Vec<f64>, z: &PySphereConfig) -> PyResult<f64> {
        self.kernel.eval(&x, &y, Some(&z.inner)).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        let rec = self.kernel.expansion().to_record().map_err(err)?;
        serde_json::to_string(&rec).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

#[pymodule]
fn pyspherekern(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eval_gegenbauer, m)?)?;
    m.add_function(wrap_pyfunction!(gegenbauer_norm, m)?)?;
    m.add_function(wrap_pyfunction!(expand_profile, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(check_pd, m)?)?;
    m.add_function(wrap_pyfunction!(check_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(addition_constants, m)?)?;
    m.add_function(wrap_pyfunction!(verify_addition, m)?)?;
    m.add_function(wrap_pyfunction!(lp_bound, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_class::<PySphereConfig>()?;
    m.add_class::<PyScalarExpansion>()?;
    m.add_class::<PyBundleKernel>()?;
    Ok(())
}
