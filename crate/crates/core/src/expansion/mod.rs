//! Gegenbauer expansions of invariant kernels: analysis (coefficient
//! extraction) and truncated synthesis for zonal kernels on the sphere,
//! cylinder kernels, and kernels on the projection bundle.
//!
//! The double sphere integrals defining the coefficients reduce, by
//! invariance, to one-dimensional integrals in `t = u₁ᵀu₂` against
//! `(1 - t²)^(α - 1/2)`. The constant from surface measures is fixed so that
//! analysis inverts synthesis on degree-`≤ d_max` kernels.

mod bundle;
mod cylinder;
mod musin;

pub use bundle::{
    synth_bundle_kernel, BundleExpansion, BundleKernel, CoefficientKernel, CustomCoefficient, FeatureMap,
};
pub use cylinder::{
    check_horizontal_invariance, cylinder_coeffs, cylinder_coeffs_monte_carlo, cylinder_gram, slice_gram, CylinderFn,
    CylinderKernel, CylinderPoint,
};
pub use musin::{musin_coeffs, MusinCoefficients, TransportedKernel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::{gegenbauer_series, GegenbauerBasis};
use crate::kernel::{check_invariance, Domain, Kernel};
use crate::sphere::SphereConfig;

/// Default truncation degree.
pub const DEFAULT_D_MAX: usize = 16;

/// Max residual accepted by the invariance pre-checks of the analysis operations.
pub const INVARIANCE_TOL: f64 = 1e-8;
pub(crate) const INVARIANCE_DRAWS: usize = 64;

/// Gegenbauer order `n/2 - 1` attached to `S^{n-1}`.
pub fn sphere_alpha(n: usize) -> f64 {
    n as f64 / 2.0 - 1.0
}

/// `e₁` and `t e₁ + √(1 - t²) e₂` in `R^n`: a pair of unit vectors with inner product `t`.
pub(crate) fn unit_pair(n: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    u1[0] = 1.0;
    u2[0] = t;
    u2[1] = (1.0 - t * t).max(0.0).sqrt();
    (u1, u2)
}

/// Coefficients `c_k` of `K(x, y) = Σ c_k P_k^{n/2-1}(xᵀy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarExpansion {
    pub n: usize,
    pub coefficients: Vec<f64>,
}

impl ScalarExpansion {
    pub fn new(n: usize, coefficients: Vec<f64>) -> Result<Self> {
        crate::quadrature::check_alpha(sphere_alpha(n))?;
        if coefficients.is_empty() {
            return Err(Error::Domain("expansion needs at least one coefficient".into()));
        }
        Ok(Self { n, coefficients })
    }

    pub fn alpha(&self) -> f64 {
        sphere_alpha(self.n)
    }

    pub fn d_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn min_coefficient(&self) -> f64 {
        self.coefficients.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// All coefficients `≥ -tol`, i.e. the synthesized kernel is p.d.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        self.min_coefficient() >= -tol
    }

    pub fn to_record(&self) -> ExpansionRecord {
        ExpansionRecord {
            n: self.n,
            r: 0,
            alpha: self.alpha(),
            d_max: self.d_max(),
            coefficients: Some(self.coefficients.clone()),
            feature_map_spec: None,
        }
    }
}

/// JSON form shared by scalar and bundle expansions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub d_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_map_spec: Option<Vec<FeatureMap>>,
}

impl ExpansionRecord {
    pub fn into_scalar(self) -> Result<ScalarExpansion> {
        let coefficients = self
            .coefficients
            .ok_or_else(|| Error::Domain("record has no scalar coefficients".into()))?;
        if self.r != 0 || coefficients.len() != self.d_max + 1 {
            return Err(Error::Domain(
                "scalar record must have r = 0 and d_max + 1 coefficients".into(),
            ));
        }
        ScalarExpansion::new(self.n, coefficients)
    }

    pub fn into_bundle(self) -> Result<BundleExpansion> {
        let maps = self
            .feature_map_spec
            .ok_or_else(|| Error::Domain("record has no feature_map_spec".into()))?;
        if maps.len() != self.d_max + 1 {
            return Err(Error::Domain("feature_map_spec must list d_max + 1 maps".into()));
        }
        BundleExpansion::new(
            self.n,
            self.r,
            maps.into_iter().map(CoefficientKernel::FeatureMap).collect(),
        )
    }
}

/// Analysis: `c_k = (1/p_{α,k}) ∫ κ(t) P_k^α(t) (1 - t²)^(α - 1/2) dt` with
/// `α = n/2 - 1` and `κ(t) = K(x, y)` at any pair with `xᵀy = t`.
pub fn schoenberg_coeffs<K: Kernel + ?Sized>(kernel: &K, d_max: usize) -> Result<ScalarExpansion> {
    let n = match kernel.domain() {
        Domain::Sphere { n } => n,
        Domain::Bundle { .. } => return Err(Error::Domain("Schoenberg analysis needs a kernel on the sphere".into())),
    };
    let alpha = sphere_alpha(n);
    let basis = GegenbauerBasis::new(alpha, d_max)?;
    let inv = check_invariance(kernel, INVARIANCE_DRAWS, 0, INVARIANCE_TOL)?;
    if !inv.pass {
        return Err(Error::NotInvariant {
            residual: inv.max_residual,
            tol: INVARIANCE_TOL,
        });
    }
    let samples = basis
        .quad
        .nodes
        .iter()
        .map(|&t| {
            let (x, y) = unit_pair(n, t);
            kernel.eval(&x, &y, None)
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarExpansion::new(n, basis.expand_samples(&samples))
}

/// `K(x, y) = Σ c_k P_k^{n/2-1}(xᵀy)`.
#[derive(Debug, Clone)]
pub struct SchoenbergKernel {
    expansion: ScalarExpansion,
}

impl SchoenbergKernel {
    pub fn expansion(&self) -> &ScalarExpansion {
        &self.expansion
    }

    pub fn profile(&self, t: f64) -> f64 {
        gegenbauer_series(self.expansion.alpha(), &self.expansion.coefficients, t.clamp(-1.0, 1.0))
    }
}

impl Kernel for SchoenbergKernel {
    fn domain(&self) -> Domain {
        Domain::Sphere { n: self.expansion.n }
    }

    fn eval(&self, x: &[f64], y: &[f64], _z: Option<&SphereConfig>) -> Result<f64> {
        let n = self.expansion.n;
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len().min(y.len()),
            });
        }
        Ok(self.profile(x.iter().zip(y).map(|(a, b)| a * b).sum()))
    }
}

pub fn synth_schoenberg(expansion: ScalarExpansion) -> SchoenbergKernel {
    SchoenbergKernel { expansion }
}
