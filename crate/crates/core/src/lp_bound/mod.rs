//! Linear programming upper bound for spherical codes.
//!
//! A code on `S^{n-1}` with pairwise angles at least `θ` has at most
//! `f(1)/c₀` points whenever `f(t) = Σ c_k P_k^{n/2-1}(t)` has `c₀ > 0`,
//! `c_k ≥ 0` and `f(t) ≤ 0` on `[-1, cos θ]`. The best such `f` is found by
//! a discretized LP, then checked on a refined grid and repaired by lowering
//! `c₀` until the sign condition holds.

mod simplex;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::sphere_alpha;
use crate::gegenbauer::{gegenbauer_all, gegenbauer_unchecked};

pub use simplex::{maximize, LpSolution};

pub const DEFAULT_GRID_POINTS: usize = 400;
pub const MAX_LP_DEGREE: usize = 60;
pub const CERTIFY_REFINE: usize = 10;
pub const VIOLATION_TOL: f64 = 1e-9;
pub const MAX_ROUNDS: usize = 3;
/// Extra drop of `c₀` below the measured violation.
pub const SAFETY_MARGIN: f64 = 1e-10;

/// `count` Chebyshev–Lobatto points on `[a, b]`, increasing, endpoints included.
pub fn chebyshev_lobatto(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count <= 1 || a == b {
        return vec![a];
    }
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut pts: Vec<f64> = (0..count)
        .map(|j| mid - half * (PI * j as f64 / (count - 1) as f64).cos())
        .collect();
    pts[0] = a;
    pts[count - 1] = b;
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `P_k^α` from the three-term recurrence.
    #[default]
    Raw,
    /// `P_k^α / P_k^α(1)`.
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPBoundProblem {
    pub n: usize,
    pub theta: f64,
    pub d_max: usize,
    pub grid: Vec<f64>,
}

impl LPBoundProblem {
    pub fn new(n: usize, theta: f64, d_max: usize) -> Result<Self> {
        let grid = chebyshev_lobatto(-1.0, theta.cos(), DEFAULT_GRID_POINTS);
        Self::with_grid(n, theta, d_max, grid)
    }

    pub fn with_grid(n: usize, theta: f64, d_max: usize, grid: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("LP bound needs n >= 3, got {n}")));
        }
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::Domain(format!("angle must lie in (0, pi], got {theta}")));
        }
        if d_max == 0 || d_max > MAX_LP_DEGREE {
            return Err(Error::Domain(format!(
                "degree must lie in 1..={MAX_LP_DEGREE}, got {d_max}"
            )));
        }
        let top = theta.cos();
        let ok =
            !grid.is_empty() && grid[0] == -1.0 && *grid.last().unwrap() == top && grid.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::Domain("grid must increase from -1 to cos(theta)".into()));
        }
        Ok(Self { n, theta, d_max, grid })
    }

    pub fn alpha(&self) -> f64 {
        sphere_alpha(self.n)
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPCertificate {
    pub n: usize,
    pub theta: f64,
    pub d_max: usize,
    pub normalization: Normalization,
    pub coefficients: Vec<f64>,
    pub bound: f64,
    /// `max f` on `[-1, cos θ]` from the refined check.
    pub max_violation: f64,
    /// Amount by which `c₀` was lowered to repair the sign condition.
    pub c0_shift: f64,
    pub rounds: usize,
    pub grid_points: usize,
}

fn basis_values(alpha: f64, norm: Normalization, t: f64, out: &mut [f64]) {
    gegenbauer_all(alpha, t, out);
    if norm == Normalization::Unit {
        for (k, v) in out.iter_mut().enumerate() {
            *v /= gegenbauer_unchecked(alpha, k, 1.0);
        }
    }
}

fn eval_poly(alpha: f64, norm: Normalization, c: &[f64], t: f64) -> f64 {
    let mut p = vec![0.0; c.len()];
    basis_values(alpha, norm, t, &mut p);
    p.iter().zip(c).map(|(a, b)| a * b).sum()
}

impl LPCertificate {
    pub fn alpha(&self) -> f64 {
        sphere_alpha(self.n)
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_poly(self.alpha(), self.normalization, &self.coefficients, t)
    }

    /// `f(1) / c₀`.
    pub fn ratio(&self) -> f64 {
        self.eval(1.0) / self.coefficients[0]
    }
}

/// Largest value of `f` on `[a, b]`: a scan of `points` Chebyshev–Lobatto
/// nodes, polished by golden-section search around each discrete local maximum.
/// Returns the maximum and the location of every polished local maximum.
fn max_on_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> (f64, Vec<f64>) {
    let ts = chebyshev_lobatto(a, b, points);
    let vs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let mut best = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut peaks = Vec::new();
    let m = ts.len();
    for j in 0..m {
        let left = j == 0 || vs[j] >= vs[j - 1];
        let right = j + 1 == m || vs[j] >= vs[j + 1];
        if !(left && right) {
            continue;
        }
        let (mut lo, mut hi) = (ts[j.saturating_sub(1)], ts[(j + 1).min(m - 1)]);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..80 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1);
            }
        }
        let (t, v) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        let (t, v) = if v >= vs[j] { (t, v) } else { (ts[j], vs[j]) };
        best = best.max(v);
        peaks.push(t);
    }
    (best, peaks)
}

fn solve_on_grid(p: &LPBoundProblem, norm: Normalization, grid: &[f64]) -> Result<Vec<f64>> {
    let alpha = p.alpha();
    let d = p.d_max;
    // dual: max Σ_j y_j  s.t.  Σ_j -P_k(t_j) y_j ≤ P_k(1), k = 1..d
    let mut vals = vec![0.0; d + 1];
    let mut a = DMatrix::zeros(d, grid.len());
    for (j, &t) in grid.iter().enumerate() {
        basis_values(alpha, norm, t, &mut vals);
        for k in 1..=d {
            a[(k - 1, j)] = -vals[k];
        }
    }
    basis_values(alpha, norm, 1.0, &mut vals);
    let b = vals[1..].to_vec();
    let c = vec![1.0; grid.len()];
    let sol = maximize(&a, &b, &c).map_err(|e| match e {
        Error::Unbounded => Error::Infeasible,
        other => other,
    })?;
    let mut coeffs = Vec::with_capacity(d + 1);
    coeffs.push(1.0);
    coeffs.extend(sol.duals);
    Ok(coeffs)
}

fn merge_grid(grid: &[f64], extra: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = grid.iter().chain(extra).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    all
}

pub fn delsarte_lp(p: &LPBoundProblem) -> Result<LPCertificate> {
    delsarte_lp_with(p, Normalization::Raw)
}

/// Solves the discretized LP, densifies the grid at violated local maxima
/// (up to [`MAX_ROUNDS`] times), then lowers `c₀` by any remaining violation
/// plus [`SAFETY_MARGIN`].
pub fn delsarte_lp_with(p: &LPBoundProblem, norm: Normalization) -> Result<LPCertificate> {
    let alpha = p.alpha();
    let top = p.cos_theta();
    let check_points = CERTIFY_REFINE * p.grid.len();
    let mut grid = p.grid.clone();
    let mut rounds = 0;
    let (coeffs, violation) = loop {
        let coeffs = solve_on_grid(p, norm, &grid)?;
        let (violation, peaks) = max_on_interval(|t| eval_poly(alpha, norm, &coeffs, t), -1.0, top, check_points);
        if violation <= 0.0 || rounds == MAX_ROUNDS {
            break (coeffs, violation);
        }
        grid = merge_grid(&grid, &peaks);
        rounds += 1;
    };
    let shift = violation.max(-SAFETY_MARGIN) + SAFETY_MARGIN;
    let mut coefficients = coeffs;
    coefficients[0] -= shift;
    if coefficients[0].is_nan() || coefficients[0] <= 0.0 {
        return Err(Error::Refinement { violation, rounds });
    }
    let mut cert = LPCertificate {
        n: p.n,
        theta: p.theta,
        d_max: p.d_max,
        normalization: norm,
        coefficients,
        bound: 0.0,
        max_violation: 0.0,
        c0_shift: shift,
        rounds,
        grid_points: grid.len(),
    };
    cert.bound = cert.ratio();
    let report = certify(&cert, p, CERTIFY_REFINE);
    if !report.pass {
        return Err(Error::Refinement {
            violation: report.max_violation,
            rounds,
        });
    }
    cert.max_violation = report.max_violation;
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub refine: usize,
    pub points: usize,
    /// `max f` on `[-1, cos θ]`; negative means a strict margin.
    pub max_violation: f64,
    pub nonnegative: bool,
    pub bound: f64,
    pub pass: bool,
}

/// Checks `f ≤ 1e-9` on a `refine`-times finer grid and the sign pattern of the coefficients.
pub fn certify(cert: &LPCertificate, p: &LPBoundProblem, refine: usize) -> MarginReport {
    let points = refine.max(1) * p.grid.len().max(2);
    let alpha = cert.alpha();
    let c = &cert.coefficients;
    let finite = c.iter().all(|v| v.is_finite());
    let (max_violation, _) = if finite {
        max_on_interval(
            |t| eval_poly(alpha, cert.normalization, c, t),
            -1.0,
            p.cos_theta(),
            points,
        )
    } else {
        (f64::NAN, Vec::new())
    };
    let nonnegative = finite && !c.is_empty() && c[0] > 0.0 && c[1..].iter().all(|&v| v >= 0.0);
    let bound = if c.is_empty() { f64::NAN } else { cert.ratio() };
    MarginReport {
        refine,
        points,
        max_violation,
        nonnegative,
        bound,
        pass: nonnegative && max_violation <= VIOLATION_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bound(n: usize, theta: f64, d: usize) -> LPCertificate {
        delsarte_lp(&LPBoundProblem::new(n, theta, d).unwrap()).unwrap()
    }

    #[test]
    fn kissing_bounds() {
        for (n, want, tol) in [(3, 13.15833, 0.05), (4, 25.55843, 0.1), (8, 240.0, 0.5)] {
            let cert = bound(n, PI / 3.0, 12);
            assert!((cert.bound - want).abs() < tol, "n={n}: {}", cert.bound);
            assert!(cert.max_violation <= VIOLATION_TOL);
        }
    }

    #[test]
    fn icosahedral_configuration_fits() {
        assert!(bound(3, PI / 3.0, 12).bound >= 12.0);
    }

    #[test]
    fn antipodal_case() {
        let cert = bound(5, PI, 4);
        assert!((cert.bound - 2.0).abs() < 1e-8, "{}", cert.bound);
    }

    #[test]
    fn certify_examples() {
        let p = LPBoundProblem::new(3, PI / 3.0, 12).unwrap();
        let cert = delsarte_lp(&p).unwrap();
        assert!(certify(&cert, &p, 10).pass);
        let mut constant = cert.clone();
        constant.coefficients = vec![1.0];
        let rep = certify(&constant, &p, 10);
        assert!(!rep.pass && (rep.max_violation - 1.0).abs() < 1e-15);
        let mut bumped = cert.clone();
        bumped.coefficients[1] += 10.0;
        assert!(!certify(&bumped, &p, 10).pass);
        let mut negative = cert;
        negative.coefficients[2] = -1e-3;
        assert!(!certify(&negative, &p, 10).nonnegative);
    }

    #[test]
    fn bad_problems() {
        assert!(LPBoundProblem::new(2, 1.0, 4).is_err());
        assert!(LPBoundProblem::new(3, 0.0, 4).is_err());
        assert!(LPBoundProblem::new(3, 1.0, 61).is_err());
        assert!(LPBoundProblem::with_grid(3, 1.0, 4, vec![-1.0, 0.2, 0.1, 1f64.cos()]).is_err());
        // a line cannot be nonpositive on [-1, cos θ] when cos θ > 0
        let p = LPBoundProblem::new(4, 1.0, 1).unwrap();
        assert_eq!(delsarte_lp(&p), Err(Error::Infeasible));
    }

    #[test]
    fn normalization_does_not_change_bound() {
        for n in [3, 5] {
            let p = LPBoundProblem::new(n, PI / 3.0, 10).unwrap();
            let raw = delsarte_lp_with(&p, Normalization::Raw).unwrap();
            let unit = delsarte_lp_with(&p, Normalization::Unit).unwrap();
            assert!(
                (raw.bound - unit.bound).abs() < 1e-7 * raw.bound,
                "{} vs {}",
                raw.bound,
                unit.bound
            );
        }
    }

    #[test]
    fn monotone_in_angle() {
        let thetas = [0.9, 1.0, PI / 3.0, 1.2, 1.5, 2.0];
        let bounds: Vec<f64> = thetas.iter().map(|&t| bound(4, t, 10).bound).collect();
        for w in bounds.windows(2) {
            assert!(w[0] >= w[1] * (1.0 - 1e-9), "{bounds:?}");
        }
    }

    #[test]
    fn monotone_in_degree() {
        let bounds: Vec<f64> = (4..=14).step_by(2).map(|d| bound(3, PI / 3.0, d).bound).collect();
        for w in bounds.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9), "{bounds:?}");
        }
    }

    #[test]
    fn json_fields() {
        let v = serde_json::to_value(bound(3, PI / 3.0, 6)).unwrap();
        for key in ["n", "theta", "d_max", "coefficients", "bound", "max_violation"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn lobatto_grid() {
        let g = chebyshev_lobatto(-1.0, 0.5, 7);
        assert_eq!((g[0], g[6]), (-1.0, 0.5));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
