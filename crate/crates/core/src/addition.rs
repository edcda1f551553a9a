//! Addition formula for Gegenbauer polynomials and its bundle form.
//!
//! With `α = (n - r)/2 - 1` and angles defined through `⟨·,·⟩_Z` and
//! `⟨·,·⟩_{[Z q]}`,
//!
//! `P_k^α(cosθ cosτ + sinθ sinτ cosγ)
//!   = Σ_i c_{k,i} sin^iθ sin^iτ P_i^{α-1/2}(cosγ) P_{k-i}^{α+i}(cosθ) P_{k-i}^{α+i}(cosτ)`.
//!
//! The constants `c_{k,i}` are fitted by least squares on a tensor grid of
//! angles and then checked against random configurations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::gegenbauer_unchecked;
use crate::quadrature::check_alpha;
use crate::sphere::{random_unit, stream_rng, SphereConfig, DEFAULT_RANK_TOL};

pub const MIN_ADDITION_ALPHA: f64 = 0.75;
pub const MAX_ADDITION_DEGREE: usize = 30;
pub const FIT_TOL: f64 = 1e-9;
const MAX_CONDITION: f64 = 1e12;

/// Angles of the fit: Chebyshev points on `(margin, π - margin)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditionGrid {
    pub margin: f64,
    pub angle_points: usize,
    pub gamma_points: usize,
}

impl AdditionGrid {
    pub fn for_degree(k: usize) -> Self {
        Self {
            margin: 0.2,
            angle_points: 5,
            gamma_points: k + 4,
        }
    }

    pub fn angles(&self, count: usize) -> Vec<f64> {
        let mid = PI / 2.0;
        let half = mid - self.margin;
        (0..count)
            .map(|j| mid + half * (PI * (2 * j + 1) as f64 / (2 * count) as f64).cos())
            .collect()
    }

    fn samples(&self) -> Vec<(f64, f64, f64)> {
        let outer = self.angles(self.angle_points);
        let inner = self.angles(self.gamma_points);
        let mut out = Vec::with_capacity(outer.len() * outer.len() * inner.len());
        for &theta in &outer {
            for &tau in &outer {
                for &gamma in &inner {
                    out.push((theta, tau, gamma));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditionConstants {
    pub alpha: f64,
    pub k: usize,
    pub c: Vec<f64>,
    pub fit_residual: f64,
    pub condition: f64,
}

impl AdditionConstants {
    /// Right-hand side of the addition formula from cosines and sines.
    pub fn expand(&self, cos_theta: f64, sin_theta: f64, cos_tau: f64, sin_tau: f64, cos_gamma: f64) -> f64 {
        let row = addition_row(self.alpha, self.k, cos_theta, sin_theta, cos_tau, sin_tau, cos_gamma);
        row.iter().zip(&self.c).map(|(a, c)| a * c).sum()
    }
}

fn addition_row(alpha: f64, k: usize, ct: f64, st: f64, cu: f64, su: f64, cg: f64) -> Vec<f64> {
    let mut sines = 1.0;
    (0..=k)
        .map(|i| {
            let order = alpha + i as f64;
            let v = sines
                * gegenbauer_unchecked(alpha - 0.5, i, cg)
                * gegenbauer_unchecked(order, k - i, ct)
                * gegenbauer_unchecked(order, k - i, cu);
            sines *= st * su;
            v
        })
        .collect()
}

/// Constants `c_{k,0..=k}` for order `alpha`, fitted on the default grid.
pub fn addition_constants(alpha: f64, k: usize) -> Result<AdditionConstants> {
    addition_constants_on(alpha, k, &AdditionGrid::for_degree(k))
}

pub fn addition_constants_on(alpha: f64, k: usize, grid: &AdditionGrid) -> Result<AdditionConstants> {
    if alpha < MIN_ADDITION_ALPHA || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "addition formula needs alpha >= {MIN_ADDITION_ALPHA}, got {alpha}"
        )));
    }
    check_alpha(alpha - 0.5)?;
    if k > MAX_ADDITION_DEGREE {
        return Err(Error::Domain(format!("degree {k} exceeds {MAX_ADDITION_DEGREE}")));
    }
    if grid.gamma_points < k + 1 || grid.angle_points == 0 || !(0.0..PI / 2.0).contains(&grid.margin) {
        return Err(Error::Domain(format!(
            "sample grid {grid:?} cannot determine {} constants",
            k + 1
        )));
    }
    if k == 0 {
        return Ok(AdditionConstants {
            alpha,
            k,
            c: vec![1.0],
            fit_residual: 0.0,
            condition: 1.0,
        });
    }
    let samples = grid.samples();
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|&(t, u, g)| addition_row(alpha, k, t.cos(), t.sin(), u.cos(), u.sin(), g.cos()))
        .collect();
    let rhs: Vec<f64> = samples
        .iter()
        .map(|&(t, u, g)| gegenbauer_unchecked(alpha, k, t.cos() * u.cos() + t.sin() * u.sin() * g.cos()))
        .collect();
    let m = rows.len();
    let a = DMatrix::from_fn(m, k + 1, |i, j| rows[i][j]);
    let scale: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut scaled = a.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col /= scale[j];
    }
    let b = DVector::from_vec(rhs);
    let svd = scaled.svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let y = svd.solve(&b, 0.0).map_err(|e| Error::Domain(e.to_string()))?;
    let c: Vec<f64> = y.iter().zip(&scale).map(|(v, s)| v / s).collect();
    let fitted = &a * DVector::from_column_slice(&c);
    let size = b.amax().max(1.0);
    let fit_residual = (fitted - &b).amax() / size;
    if fit_residual > FIT_TOL {
        return Err(Error::FitResidual {
            residual: fit_residual,
            tol: FIT_TOL,
        });
    }
    Ok(AdditionConstants {
        alpha,
        k,
        c,
        fit_residual,
        condition,
    })
}

/// Both sides of the bundle addition formula at one `(Z, q, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdditionSides {
    pub lhs: f64,
    pub rhs: f64,
}

/// Angles of the formula expressed through `⟨·,·⟩_Z` and `⟨·,·⟩_{[Z q]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BundleAngles {
    cos_xy: f64,
    cos_theta: f64,
    sin_theta: f64,
    cos_tau: f64,
    sin_tau: f64,
    cos_gamma: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn extend(cfg: &SphereConfig, q: &[f64]) -> Result<SphereConfig> {
    let (n, r) = (cfg.n(), cfg.r());
    if q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.len(),
        });
    }
    let mut zq = cfg.z().clone().insert_column(r, 0.0);
    zq.column_mut(r).copy_from_slice(q);
    let ext = SphereConfig::with_tolerances(zq, DEFAULT_RANK_TOL, cfg.tol_perp())?;
    ext.projectors()?;
    Ok(ext)
}

fn bundle_angles(cfg: &SphereConfig, ext: &SphereConfig, q: &[f64], x: &[f64], y: &[f64]) -> Result<BundleAngles> {
    let tol = cfg.tol_perp();
    let nz = |v: &[f64]| -> Result<f64> {
        let p = norm(&cfg.perp(v)?);
        if p <= tol {
            return Err(Error::Singular { norm: p, tol });
        }
        Ok(p)
    };
    let (nx, ny, nq) = (nz(x)?, nz(y)?, nz(q)?);
    let px = ext.perp(x)?;
    let py = ext.perp(y)?;
    let (mx, my) = (norm(&px), norm(&py));
    let cos_gamma = if mx <= tol || my <= tol {
        0.0
    } else {
        (px.iter().zip(&py).map(|(a, b)| a * b).sum::<f64>() / (mx * my)).clamp(-1.0, 1.0)
    };
    Ok(BundleAngles {
        cos_xy: (cfg.inner_z(x, y)? / (nx * ny)).clamp(-1.0, 1.0),
        cos_theta: (cfg.inner_z(x, q)? / (nx * nq)).clamp(-1.0, 1.0),
        sin_theta: (mx / nx).min(1.0),
        cos_tau: (cfg.inner_z(y, q)? / (ny * nq)).clamp(-1.0, 1.0),
        sin_tau: (my / ny).min(1.0),
        cos_gamma,
    })
}

/// Evaluates both sides for the configuration `cfg` extended by `q`.
pub fn addition_sides(
    cfg: &SphereConfig,
    q: &[f64],
    x: &[f64],
    y: &[f64],
    constants: &AdditionConstants,
) -> Result<AdditionSides> {
    let ext = extend(cfg, q)?;
    let a = bundle_angles(cfg, &ext, q, x, y)?;
    let lhs = gegenbauer_unchecked(constants.alpha, constants.k, a.cos_xy);
    let rhs = constants.expand(a.cos_theta, a.sin_theta, a.cos_tau, a.sin_tau, a.cos_gamma);
    Ok(AdditionSides { lhs, rhs })
}

/// Deviations in the two identities linking the angles to the inner products:
/// `sinθ = √(⟨x,x⟩_{[Z q]}/⟨x,x⟩_Z)` against `√(1 - cos²θ)`, and
/// `cosθ cosτ + sinθ sinτ cosγ` against `⟨x,y⟩_Z / √(⟨x,x⟩_Z ⟨y,y⟩_Z)`.
pub fn angle_identity_errors(cfg: &SphereConfig, q: &[f64], x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let ext = extend(cfg, q)?;
    let a = bundle_angles(cfg, &ext, q, x, y)?;
    let st = (1.0 - a.cos_theta * a.cos_theta).max(0.0).sqrt();
    let su = (1.0 - a.cos_tau * a.cos_tau).max(0.0).sqrt();
    let xx = ext.inner_z(x, x)?.max(0.0);
    let sin_err = ((xx / cfg.inner_z(x, x)?).sqrt() - st).abs();
    let cos_err = (a.cos_theta * a.cos_tau + st * su * a.cos_gamma - a.cos_xy).abs();
    Ok((sin_err, cos_err))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditionReport {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub alpha: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Max |LHS - RHS| for each degree `0..=k`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

/// `(Z, q, x, y)`.
type Case = (SphereConfig, Vec<f64>, Vec<f64>, Vec<f64>);

fn draw_case(n: usize, r: usize, seed: u64, index: usize) -> Result<Case> {
    let mut rng = stream_rng(seed, index as u64);
    for _ in 0..64 {
        let cfg = SphereConfig::random_full_rank(n, r, &mut rng)?;
        let q = random_unit(n, &mut rng);
        let x = random_unit(n, &mut rng);
        let y = random_unit(n, &mut rng);
        let ok = extend(&cfg, &q).is_ok()
            && [&x, &y, &q]
                .iter()
                .all(|v| cfg.inner_z(v, v).is_ok_and(|s| s.sqrt() > cfg.tol_perp()));
        if ok {
            return Ok((cfg, q, x, y));
        }
    }
    Err(Error::Domain("could not draw a non-degenerate sample".into()))
}

/// Checks the formula for degrees `0..=k` at `samples` random `(Z, q, x, y)`.
pub fn verify_addition(n: usize, r: usize, k: usize, samples: usize, seed: u64, tol: f64) -> Result<AdditionReport> {
    if n < r + 4 {
        return Err(Error::Domain(format!(
            "addition formula needs n - r >= 4 so that alpha - 1/2 >= {}, got n={n}, r={r}",
            MIN_ADDITION_ALPHA - 0.5
        )));
    }
    let alpha = (n - r) as f64 / 2.0 - 1.0;
    let constants = (0..=k)
        .map(|d| addition_constants(alpha, d))
        .collect::<Result<Vec<_>>>()?;
    let per_sample = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (cfg, q, x, y) = draw_case(n, r, seed, i)?;
            constants
                .iter()
                .map(|c| addition_sides(&cfg, &q, &x, &y, c).map(|s| (s.lhs - s.rhs).abs()))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = (0..=k)
        .map(|d| per_sample.iter().map(|v| v[d]).fold(0.0, f64::max))
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(AdditionReport {
        n,
        r,
        k,
        alpha,
        samples,
        seed,
        tol,
        residuals,
        max_residual,
        pass: max_residual < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn degree_zero_and_one() {
        let c0 = addition_constants(1.5, 0).unwrap();
        assert_eq!(c0.c.len(), 1);
        assert!((c0.c[0] - 1.0).abs() < 1e-14);
        for alpha in [0.75, 1.0, 1.5, 2.5, 7.0] {
            let c = addition_constants(alpha, 1).unwrap().c;
            assert!((c[0] - 1.0 / (2.0 * alpha)).abs() < 1e-10, "{alpha}");
            assert!((c[1] - 2.0 * alpha / (2.0 * alpha - 1.0)).abs() < 1e-10, "{alpha}");
        }
    }

    #[test]
    fn constants_are_positive() {
        for alpha in [1.0, 1.5, 2.5] {
            for k in 0..=10 {
                let c = addition_constants(alpha, k).unwrap();
                assert!(c.c.iter().all(|&v| v > 0.0), "alpha={alpha} k={k}: {:?}", c.c);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(addition_constants(0.7, 2).is_err());
        assert!(addition_constants(1.0, 31).is_err());
        assert!(addition_constants(1.0, 30).is_ok());
        let thin = AdditionGrid {
            margin: 0.2,
            angle_points: 5,
            gamma_points: 3,
        };
        assert!(addition_constants_on(1.0, 4, &thin).is_err());
        assert!(verify_addition(5, 2, 2, 10, 0, 1e-8).is_err());
    }

    #[test]
    fn disjoint_fits_agree() {
        let other = |k: usize| AdditionGrid {
            margin: 0.3,
            angle_points: 6,
            gamma_points: k + 7,
        };
        for k in [3, 6, 12] {
            let (a, b) = (AdditionGrid::for_degree(k), other(k));
            // no shared θ value, so no shared (θ, τ, γ) sample
            for s in a.angles(a.angle_points) {
                assert!(b.angles(b.angle_points).iter().all(|t| (s - t).abs() > 1e-6));
            }
            let c1 = addition_constants_on(1.5, k, &a).unwrap().c;
            let c2 = addition_constants_on(1.5, k, &b).unwrap().c;
            for (x, y) in c1.iter().zip(&c2) {
                assert!((x - y).abs() <= 1e-8 * x.abs(), "k={k}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn degree_zero_residual_is_exact() {
        let rep = verify_addition(6, 1, 0, 50, 3, 1e-12).unwrap();
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn identity_holds_on_random_configurations() {
        let rep = verify_addition(6, 1, 6, 200, 7, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
        let rep = verify_addition(9, 3, 8, 50, 1, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn q_equal_to_y() {
        let mut rng = rng_from_seed(4);
        let cfg = SphereConfig::random_full_rank(6, 1, &mut rng).unwrap();
        let x = random_unit(6, &mut rng);
        let q = random_unit(6, &mut rng);
        for k in 0..=6 {
            let c = addition_constants(1.5, k).unwrap();
            let s = addition_sides(&cfg, &q, &x, &q, &c).unwrap();
            assert!((s.lhs - s.rhs).abs() < 1e-9, "k={k}: {s:?}");
        }
    }

    #[test]
    fn singular_inputs() {
        let mut rng = rng_from_seed(5);
        let cfg = SphereConfig::random_full_rank(6, 1, &mut rng).unwrap();
        let z0: Vec<f64> = cfg.z().column(0).iter().copied().collect();
        let x = random_unit(6, &mut rng);
        let c = addition_constants(1.5, 2).unwrap();
        assert!(matches!(
            addition_sides(&cfg, &x, &z0, &x, &c),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn angle_identities() {
        let mut worst = (0.0f64, 0.0f64);
        for i in 0..1000 {
            let (cfg, q, x, y) = draw_case(7, 2, 11, i).unwrap();
            let (a, b) = angle_identity_errors(&cfg, &q, &x, &y).unwrap();
            worst = (worst.0.max(a), worst.1.max(b));
        }
        assert!(worst.0 < 1e-10 && worst.1 < 1e-10, "{worst:?}");
    }

    #[test]
    fn json_tables() {
        let c = addition_constants(2.0, 3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["c"].as_array().unwrap().len(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn classical_formula_off_grid(alpha in 0.75f64..4.0, k in 0usize..9,
                                      t in 0.01f64..3.13, u in 0.01f64..3.13, g in 0.0f64..PI) {
            let c = addition_constants(alpha, k).unwrap();
            let lhs = gegenbauer_unchecked(alpha, k, t.cos() * u.cos() + t.sin() * u.sin() * g.cos());
            let rhs = c.expand(t.cos(), t.sin(), u.cos(), u.sin(), g.cos());
            prop_assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
        }
    }
}
