//! Kernels on the cylinder `S^{n-1} × A → B` and their coefficient kernels
//! `(c_k)_b(a₁, a₂)` under the horizontal `O_n` action.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sphere_alpha, unit_pair, INVARIANCE_DRAWS, INVARIANCE_TOL};
use crate::error::{Error, Result};
use crate::gegenbauer::{gegenbauer_all, GegenbauerBasis};
use crate::kernel::InvarianceReport;
use crate::sphere::{random_orthogonal, random_unit, stream_rng};

/// `K_b((a₁, u₁), (a₂, u₂))` with `u₁, u₂ ∈ S^{n-1}` and `a₁, a₂` in the fiber over `b`.
pub trait CylinderKernel: Send + Sync {
    /// Ambient dimension `n` of the sphere factor.
    fn sphere_dim(&self) -> usize;

    fn eval(&self, b: &[f64], a1: &[f64], u1: &[f64], a2: &[f64], u2: &[f64]) -> Result<f64>;
}

impl<K: CylinderKernel + ?Sized> CylinderKernel for &K {
    fn sphere_dim(&self) -> usize {
        (**self).sphere_dim()
    }
    fn eval(&self, b: &[f64], a1: &[f64], u1: &[f64], a2: &[f64], u2: &[f64]) -> Result<f64> {
        (**self).eval(b, a1, u1, a2, u2)
    }
}

pub struct CylinderFn<F> {
    n: usize,
    f: F,
}

impl<F> CylinderFn<F>
where
    F: Fn(&[f64], &[f64], &[f64], &[f64], &[f64]) -> f64 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> CylinderKernel for CylinderFn<F>
where
    F: Fn(&[f64], &[f64], &[f64], &[f64], &[f64]) -> f64 + Send + Sync,
{
    fn sphere_dim(&self) -> usize {
        self.n
    }
    fn eval(&self, b: &[f64], a1: &[f64], u1: &[f64], a2: &[f64], u2: &[f64]) -> Result<f64> {
        Ok((self.f)(b, a1, u1, a2, u2))
    }
}

/// A point `(a, u)` of the cylinder fiber `A_b × S^{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub a: Vec<f64>,
    pub u: Vec<f64>,
}

fn rotate(m: &DMatrix<f64>, u: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(u)).as_slice().to_vec()
}

/// Residual of `K_b((a₁, Mu₁), (a₂, Mu₂)) = K_b((a₁, u₁), (a₂, u₂))` for random `u`, `M`.
pub fn check_horizontal_invariance<K: CylinderKernel + ?Sized>(
    kernel: &K,
    b: &[f64],
    a1: &[f64],
    a2: &[f64],
    draws: usize,
    seed: u64,
    tol: f64,
) -> Result<InvarianceReport> {
    let n = kernel.sphere_dim();
    let residuals: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let u1 = random_unit(n, &mut rng);
            let u2 = random_unit(n, &mut rng);
            let m = random_orthogonal(n, &mut rng);
            let moved = kernel.eval(b, a1, &rotate(&m, &u1), a2, &rotate(&m, &u2))?;
            Ok((moved - kernel.eval(b, a1, &u1, a2, &u2)?).abs())
        })
        .collect::<Result<_>>()?;
    let max_residual = residuals.into_iter().fold(0.0, f64::max);
    Ok(InvarianceReport {
        draws,
        seed,
        tol,
        max_residual,
        pass: max_residual < tol,
    })
}

/// One-dimensional reduction of the coefficient integral, no invariance check.
pub(crate) fn cylinder_coeffs_with<K: CylinderKernel + ?Sized>(
    basis: &GegenbauerBasis,
    kernel: &K,
    b: &[f64],
    a1: &[f64],
    a2: &[f64],
) -> Result<Vec<f64>> {
    let n = kernel.sphere_dim();
    let samples = basis
        .quad
        .nodes
        .iter()
        .map(|&t| {
            let (u1, u2) = unit_pair(n, t);
            kernel.eval(b, a1, &u1, a2, &u2)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(basis.expand_samples(&samples))
}

/// `(c_k)_b(a₁, a₂)` for `k = 0..=d_max`, after checking horizontal invariance.
pub fn cylinder_coeffs<K: CylinderKernel + ?Sized>(
    kernel: &K,
    b: &[f64],
    a1: &[f64],
    a2: &[f64],
    d_max: usize,
) -> Result<Vec<f64>> {
    let n = kernel.sphere_dim();
    if n < 2 {
        return Err(Error::Domain(format!(
            "sphere factor S^{} is too small",
            n as isize - 1
        )));
    }
    let basis = GegenbauerBasis::new(sphere_alpha(n), d_max)?;
    let inv = check_horizontal_invariance(kernel, b, a1, a2, INVARIANCE_DRAWS, 0, INVARIANCE_TOL)?;
    if !inv.pass {
        return Err(Error::NotInvariant {
            residual: inv.max_residual,
            tol: INVARIANCE_TOL,
        });
    }
    cylinder_coeffs_with(&basis, kernel, b, a1, a2)
}

/// Monte-Carlo estimate of the full double-sphere coefficient integral,
/// normalized by the same estimate of `∫∫ P_k(u₁ᵀu₂)²`. Low precision; meant
/// as a cross-check of [`cylinder_coeffs`].
pub fn cylinder_coeffs_monte_carlo<K: CylinderKernel + ?Sized>(
    kernel: &K,
    b: &[f64],
    a1: &[f64],
    a2: &[f64],
    d_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = kernel.sphere_dim();
    let alpha = sphere_alpha(n);
    crate::quadrature::check_alpha(alpha)?;
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let mut num = vec![0.0; d_max + 1];
            let mut den = vec![0.0; d_max + 1];
            let mut p = vec![0.0; d_max + 1];
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let u1 = random_unit(n, &mut rng);
                let u2 = random_unit(n, &mut rng);
                let t: f64 = u1.iter().zip(&u2).map(|(x, y)| x * y).sum();
                gegenbauer_all(alpha, t.clamp(-1.0, 1.0), &mut p);
                let v = kernel.eval(b, a1, &u1, a2, &u2)?;
                for k in 0..=d_max {
                    num[k] += v * p[k];
                    den[k] += p[k] * p[k];
                }
            }
            Ok((num, den))
        })
        .collect::<Result<_>>()?;
    let mut num = vec![0.0; d_max + 1];
    let mut den = vec![0.0; d_max + 1];
    for (pn, pd) in partial {
        for k in 0..=d_max {
            num[k] += pn[k];
            den[k] += pd[k];
        }
    }
    Ok(num.iter().zip(&den).map(|(a, b)| a / b).collect())
}

/// Gram matrix of the cylinder kernel over the fiber at `b`.
pub fn cylinder_gram<K: CylinderKernel + ?Sized>(
    kernel: &K,
    b: &[f64],
    points: &[CylinderPoint],
) -> Result<DMatrix<f64>> {
    let m = points.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = kernel.eval(b, &points[i].a, &points[i].u, &points[j].a, &points[j].u)?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `S[i][j] = K_b((a₁, u_i), (a₂, u_j))`: the kernel restricted to fixed fiber
/// coordinates. For `a₁ ≠ a₂` this is not a principal block of the cylinder
/// Gram matrix and need not be p.d.
pub fn slice_gram<K: CylinderKernel + ?Sized>(
    kernel: &K,
    b: &[f64],
    a1: &[f64],
    a2: &[f64],
    us: &[Vec<f64>],
) -> Result<DMatrix<f64>> {
    let m = us.len();
    let mut s = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            s[(i, j)] = kernel.eval(b, a1, &us[i], a2, &us[j])?;
        }
    }
    Ok(s)
}
