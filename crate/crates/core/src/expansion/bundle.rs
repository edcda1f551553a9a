//! Kernels on the projection bundle `S^{n-1} × (S^{n-1})^r → (S^{n-1})^r`
//! synthesized from coefficient kernels on the orbit space:
//!
//! `K_Z(x, y) = Σ_i (c_i)(Zᵀx, Zᵀy, ZᵀZ) · P_i^{(n-r)/2-1}(cos ∠(Π_Z^⊥x, Π_Z^⊥y))`.
//!
//! Every such kernel is `O_n`-invariant, and it is p.d. whenever each
//! `c_i(·, ·, Y)` is p.d. Feature-map coefficients make the latter hold by
//! construction.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::gegenbauer_all;
use crate::kernel::{Domain, GramReport, Kernel, DEFAULT_PD_TOL};
use crate::quadrature::check_alpha;
use crate::sphere::{random_unit, stream_rng, SphereConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureBasis {
    /// `[1, y_i, y_i y_j (i ≤ j), Y_ij (i < j)]`.
    Quadratic,
}

impl FeatureBasis {
    pub fn len(&self, r: usize) -> usize {
        match self {
            FeatureBasis::Quadratic => 1 + r + r * r,
        }
    }

    fn features(&self, y: &[f64], big_y: &DMatrix<f64>) -> Vec<f64> {
        let r = y.len();
        let mut f = Vec::with_capacity(self.len(r));
        f.push(1.0);
        f.extend_from_slice(y);
        for i in 0..r {
            for j in i..r {
                f.push(y[i] * y[j]);
            }
        }
        for i in 0..r {
            for j in i + 1..r {
                f.push(big_y[(i, j)]);
            }
        }
        f
    }
}

/// Feature map `g(y, Y) = W φ(y, Y)` inducing the coefficient kernel
/// `c(y₁, y₂, Y) = g(y₁, Y)ᵀ g(y₂, Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    pub basis: FeatureBasis,
    /// `s` rows of `basis.len(r)` weights.
    pub weights: Vec<Vec<f64>>,
}

impl FeatureMap {
    pub fn quadratic(weights: Vec<Vec<f64>>) -> Self {
        Self {
            basis: FeatureBasis::Quadratic,
            weights,
        }
    }

    /// `s` Gaussian rows scaled by `1/√(feature count)`.
    pub fn random<R: Rng + ?Sized>(r: usize, s: usize, rng: &mut R) -> Self {
        let basis = FeatureBasis::Quadratic;
        let width = basis.len(r);
        let scale = 1.0 / (width as f64).sqrt();
        let weights = (0..s)
            .map(|_| {
                (0..width)
                    .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        Self { basis, weights }
    }

    pub fn eval(&self, y: &[f64], big_y: &DMatrix<f64>) -> Vec<f64> {
        let phi = self.basis.features(y, big_y);
        self.weights
            .iter()
            .map(|row| row.iter().zip(&phi).map(|(w, f)| w * f).sum())
            .collect()
    }

    pub fn kernel(&self, y1: &[f64], y2: &[f64], big_y: &DMatrix<f64>) -> f64 {
        let g1 = self.eval(y1, big_y);
        let g2 = self.eval(y2, big_y);
        g1.iter().zip(&g2).map(|(a, b)| a * b).sum()
    }

    fn check_width(&self, r: usize) -> Result<()> {
        let width = self.basis.len(r);
        if let Some(row) = self.weights.iter().find(|row| row.len() != width) {
            return Err(Error::DimensionMismatch {
                expected: width,
                found: row.len(),
            });
        }
        Ok(())
    }
}

/// User-supplied coefficient kernel `(y₁, y₂, Y) ↦ c(y₁, y₂, Y)`.
pub type CustomCoefficient = Arc<dyn Fn(&[f64], &[f64], &DMatrix<f64>) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum CoefficientKernel {
    FeatureMap(FeatureMap),
    Custom(CustomCoefficient),
}

impl fmt::Debug for CoefficientKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientKernel::FeatureMap(m) => f.debug_tuple("FeatureMap").field(m).finish(),
            CoefficientKernel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl CoefficientKernel {
    pub fn eval(&self, y1: &[f64], y2: &[f64], big_y: &DMatrix<f64>) -> f64 {
        match self {
            CoefficientKernel::FeatureMap(m) => m.kernel(y1, y2, big_y),
            CoefficientKernel::Custom(f) => f(y1, y2, big_y),
        }
    }
}

/// Truncated bundle expansion with coefficient kernels for degrees `0..=d_max`.
#[derive(Debug, Clone)]
pub struct BundleExpansion {
    pub n: usize,
    pub r: usize,
    pub coefficients: Vec<CoefficientKernel>,
}

impl BundleExpansion {
    pub fn new(n: usize, r: usize, coefficients: Vec<CoefficientKernel>) -> Result<Self> {
        if n < r + 2 {
            return Err(Error::Domain(format!(
                "bundle expansion needs n >= r + 2, got n={n}, r={r}"
            )));
        }
        check_alpha(bundle_alpha(n, r))?;
        if coefficients.is_empty() {
            return Err(Error::Domain("expansion needs at least one coefficient kernel".into()));
        }
        for c in &coefficients {
            if let CoefficientKernel::FeatureMap(m) = c {
                m.check_width(r)?;
            }
        }
        Ok(Self { n, r, coefficients })
    }

    /// Random quadratic feature maps with `features` outputs per degree.
    pub fn random(n: usize, r: usize, d_max: usize, features: usize, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, u64::MAX);
        let maps = (0..=d_max)
            .map(|_| CoefficientKernel::FeatureMap(FeatureMap::random(r, features, &mut rng)))
            .collect();
        Self::new(n, r, maps)
    }

    pub fn alpha(&self) -> f64 {
        bundle_alpha(self.n, self.r)
    }

    pub fn d_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient_values(&self, y1: &[f64], y2: &[f64], big_y: &DMatrix<f64>) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.eval(y1, y2, big_y)).collect()
    }

    /// JSON record; fails for custom coefficient kernels, which have no serial form.
    pub fn to_record(&self) -> Result<super::ExpansionRecord> {
        let maps = self
            .coefficients
            .iter()
            .map(|c| match c {
                CoefficientKernel::FeatureMap(m) => Ok(m.clone()),
                CoefficientKernel::Custom(_) => {
                    Err(Error::Domain("custom coefficient kernels cannot be serialized".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(super::ExpansionRecord {
            n: self.n,
            r: self.r,
            alpha: self.alpha(),
            d_max: self.d_max(),
            coefficients: None,
            feature_map_spec: Some(maps),
        })
    }

    /// Randomized p.d. test of each custom coefficient kernel on sampled fibers.
    fn check_custom_coefficients(&self) -> Result<()> {
        const TRIALS: usize = 10;
        const POINTS: usize = 30;
        for (i, c) in self.coefficients.iter().enumerate() {
            let CoefficientKernel::Custom(f) = c else { continue };
            for trial in 0..TRIALS {
                let mut rng = stream_rng(i as u64, trial as u64);
                let cfg = SphereConfig::random_full_rank(self.n, self.r, &mut rng)?;
                let big_y = cfg.gram();
                let us = (0..POINTS)
                    .map(|_| cfg.coordinates(&random_unit(self.n, &mut rng)))
                    .collect::<Result<Vec<_>>>()?;
                let g = DMatrix::from_fn(POINTS, POINTS, |a, b| f(&us[a], &us[b], &big_y));
                let sym = (&g + g.transpose()) * 0.5;
                let rep = GramReport::from_gram(&sym, DEFAULT_PD_TOL);
                if !rep.pass {
                    return Err(Error::NotPositiveDefinite {
                        min_eigenvalue: rep.min_eigenvalue,
                        tol: rep.scaled_tol,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Gegenbauer order `(n - r)/2 - 1` of the bundle expansion.
pub fn bundle_alpha(n: usize, r: usize) -> f64 {
    (n as f64 - r as f64) / 2.0 - 1.0
}

/// Evaluator of a [`BundleExpansion`].
#[derive(Debug, Clone)]
pub struct BundleKernel {
    expansion: BundleExpansion,
}

impl BundleKernel {
    pub fn expansion(&self) -> &BundleExpansion {
        &self.expansion
    }

    fn eval_at(&self, x: &[f64], y: &[f64], cfg: &SphereConfig) -> Result<f64> {
        let e = &self.expansion;
        if cfg.n() != e.n || cfg.r() != e.r {
            return Err(Error::DimensionMismatch {
                expected: e.n,
                found: cfg.n(),
            });
        }
        let px = cfg.perp(x)?;
        let py = cfg.perp(y)?;
        let nx = px.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = py.iter().map(|v| v * v).sum::<f64>().sqrt();
        let tol = cfg.tol_perp();
        if nx <= tol || ny <= tol {
            return Err(Error::Singular { norm: nx.min(ny), tol });
        }
        let t = (px.iter().zip(&py).map(|(a, b)| a * b).sum::<f64>() / (nx * ny)).clamp(-1.0, 1.0);
        let u1 = cfg.coordinates(x)?;
        let u2 = cfg.coordinates(y)?;
        let big_y = cfg.gram();
        let mut p = vec![0.0; e.coefficients.len()];
        gegenbauer_all(e.alpha(), t, &mut p);
        Ok(e.coefficients
            .iter()
            .zip(&p)
            .map(|(c, pk)| c.eval(&u1, &u2, &big_y) * pk)
            .sum())
    }
}

impl Kernel for BundleKernel {
    fn domain(&self) -> Domain {
        Domain::Bundle {
            n: self.expansion.n,
            r: self.expansion.r,
        }
    }

    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        match z {
            Some(cfg) => self.eval_at(x, y, cfg),
            None if self.expansion.r == 0 => {
                self.eval_at(x, y, &SphereConfig::new(DMatrix::zeros(self.expansion.n, 0))?)
            }
            None => Err(Error::Domain("bundle kernel needs a base configuration Z".into())),
        }
    }
}

/// Builds the evaluator; custom coefficient kernels are p.d.-checked on sampled fibers first.
pub fn synth_bundle_kernel(expansion: BundleExpansion) -> Result<BundleKernel> {
    expansion.check_custom_coefficients()?;
    Ok(BundleKernel { expansion })
}
