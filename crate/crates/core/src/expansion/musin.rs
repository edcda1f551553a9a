//! Coefficient kernels of a `Stab_{O_n}(Z)`-invariant kernel for a fixed `Z`.
//!
//! The kernel is transported to the cylinder `S^{n-r-1} × B_Z` through `T₁`,
//! `L((u₁, v₁), (u₂, v₂)) = K(T₁(v₁, u₁), T₁(v₂, u₂))`, which is invariant under
//! the horizontal `O_{n-r}` action, and the cylinder analysis yields
//! `(d_k)_Z(u₁, u₂)`. Off `R(Z)` the kernel is recovered as
//! `K(x, y) = Σ_k (d_k)_Z(Zᵀx, Zᵀy) P_k^{(n-r)/2-1}(cos ∠(Π_Z^⊥x, Π_Z^⊥y))`.

use super::bundle::bundle_alpha;
use super::cylinder::{cylinder_coeffs_with, CylinderKernel};
use super::{INVARIANCE_DRAWS, INVARIANCE_TOL};
use crate::error::{Error, Result};
use crate::gegenbauer::{gegenbauer_series, GegenbauerBasis};
use crate::kernel::{check_stabilizer_invariance, Domain, Kernel};
use crate::sphere::SphereConfig;

/// `L` on the cylinder `S^{n-r-1} × B_Z`; fiber coordinates are `u ∈ B_Z`.
pub struct TransportedKernel<'a, K: ?Sized> {
    kernel: &'a K,
    cfg: &'a SphereConfig,
}

impl<'a, K: Kernel + ?Sized> TransportedKernel<'a, K> {
    pub fn new(kernel: &'a K, cfg: &'a SphereConfig) -> Self {
        Self { kernel, cfg }
    }
}

impl<K: Kernel + ?Sized> CylinderKernel for TransportedKernel<'_, K> {
    fn sphere_dim(&self) -> usize {
        self.cfg.n() - self.cfg.r()
    }

    fn eval(&self, _b: &[f64], a1: &[f64], v1: &[f64], a2: &[f64], v2: &[f64]) -> Result<f64> {
        let x = self.cfg.map_t1(v1, a1)?;
        let y = self.cfg.map_t1(v2, a2)?;
        self.kernel.eval(&x, &y, Some(self.cfg))
    }
}

/// The coefficient kernels `(d_k)_Z` of one kernel at one configuration.
pub struct MusinCoefficients<K> {
    kernel: K,
    cfg: SphereConfig,
    basis: GegenbauerBasis,
}

/// Prepares `(d_k)_Z` for `k = 0..=d_max` after checking `Stab_{O_n}(Z)`-invariance.
pub fn musin_coeffs<K: Kernel>(kernel: K, cfg: &SphereConfig, d_max: usize) -> Result<MusinCoefficients<K>> {
    cfg.projectors()?;
    let domain = kernel.domain();
    if domain.n() != cfg.n() {
        return Err(Error::DimensionMismatch {
            expected: cfg.n(),
            found: domain.n(),
        });
    }
    if let Domain::Bundle { r, .. } = domain {
        if r != cfg.r() {
            return Err(Error::DimensionMismatch {
                expected: cfg.r(),
                found: r,
            });
        }
    }
    if cfg.n() < cfg.r() + 2 {
        return Err(Error::Domain("need n >= r + 2".into()));
    }
    let basis = GegenbauerBasis::new(bundle_alpha(cfg.n(), cfg.r()), d_max)?;
    let inv = check_stabilizer_invariance(&kernel, cfg, INVARIANCE_DRAWS, 0, INVARIANCE_TOL)?;
    if !inv.pass {
        return Err(Error::NotInvariant {
            residual: inv.max_residual,
            tol: INVARIANCE_TOL,
        });
    }
    Ok(MusinCoefficients {
        kernel,
        cfg: cfg.clone(),
        basis,
    })
}

impl<K: Kernel> MusinCoefficients<K> {
    pub fn config(&self) -> &SphereConfig {
        &self.cfg
    }

    pub fn d_max(&self) -> usize {
        self.basis.max_degree
    }

    pub fn alpha(&self) -> f64 {
        self.basis.alpha
    }

    fn check_interior(&self, u: &[f64]) -> Result<()> {
        let g2 = self.cfg.gamma_norm_sq(u)?;
        let perp = (1.0 - g2).max(0.0).sqrt();
        if perp <= self.cfg.tol_perp() {
            return Err(Error::Singular {
                norm: perp,
                tol: self.cfg.tol_perp(),
            });
        }
        Ok(())
    }

    /// `[(d_0)_Z(u₁, u₂), …, (d_{d_max})_Z(u₁, u₂)]` for `u₁, u₂` in the interior of `B_Z`.
    pub fn coefficients(&self, u1: &[f64], u2: &[f64]) -> Result<Vec<f64>> {
        self.check_interior(u1)?;
        self.check_interior(u2)?;
        let transported = TransportedKernel::new(&self.kernel, &self.cfg);
        cylinder_coeffs_with(&self.basis, &transported, &[], u1, u2)
    }

    /// `Σ_k (d_k)_Z(Zᵀx, Zᵀy) P_k(cos ∠(Π_Z^⊥x, Π_Z^⊥y))`.
    pub fn reconstruct(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let px = self.cfg.perp(x)?;
        let py = self.cfg.perp(y)?;
        let nx = px.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = py.iter().map(|v| v * v).sum::<f64>().sqrt();
        let tol = self.cfg.tol_perp();
        if nx <= tol || ny <= tol {
            return Err(Error::Singular { norm: nx.min(ny), tol });
        }
        let t = (px.iter().zip(&py).map(|(a, b)| a * b).sum::<f64>() / (nx * ny)).clamp(-1.0, 1.0);
        let d = self.coefficients(&self.cfg.coordinates(x)?, &self.cfg.coordinates(y)?)?;
        Ok(gegenbauer_series(self.alpha(), &d, t))
    }
}
