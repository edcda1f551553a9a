//! Gegenbauer (ultraspherical) polynomials `P_d^α`.
//!
//! Polynomials follow the classical normalization `P_0 = 1`, `P_1 = 2αt` and
//! the three-term recurrence
//! `d P_d(t) = 2t(d + α - 1) P_{d-1}(t) - (d + 2α - 2) P_{d-2}(t)`,
//! evaluated forward in `d`. They are orthogonal on `[-1, 1]` against
//! `(1 - t²)^(α - 1/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{check_alpha, QuadratureRule};

/// Extra nodes added on top of `d_max` when building a basis rule.
pub const EXTRA_NODES: usize = 8;

const T_SLACK: f64 = 1e-12;

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t.abs() > 1.0 + T_SLACK {
        return Err(Error::Domain(format!("argument t = {t} outside [-1, 1]")));
    }
    Ok(())
}

/// `P_d^α(t)` by forward recurrence.
pub fn eval_gegenbauer(alpha: f64, d: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(gegenbauer_unchecked(alpha, d, t))
}

/// Recurrence without domain checks; callers guarantee `|t| ≤ 1`.
pub(crate) fn gegenbauer_unchecked(alpha: f64, d: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    if d == 0 {
        return prev;
    }
    let mut cur = 2.0 * alpha * t;
    for k in 2..=d {
        let kf = k as f64;
        let next = (2.0 * t * (kf + alpha - 1.0) * cur - (kf + 2.0 * alpha - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = P_k^α(t)` for `k = 0..out.len()`.
pub(crate) fn gegenbauer_all(alpha: f64, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 2.0 * alpha * t;
    }
    for k in 2..out.len() {
        let kf = k as f64;
        out[k] = (2.0 * t * (kf + alpha - 1.0) * out[k - 1] - (kf + 2.0 * alpha - 2.0) * out[k - 2]) / kf;
    }
}

/// `Σ_k c_k P_k^α(t)`.
pub(crate) fn gegenbauer_series(alpha: f64, coefficients: &[f64], t: f64) -> f64 {
    let mut buf = vec![0.0; coefficients.len()];
    gegenbauer_all(alpha, t, &mut buf);
    buf.iter().zip(coefficients).map(|(p, c)| p * c).sum()
}

/// Squared weighted norm `p_{α,k} = ∫ P_k(t)² (1 - t²)^(α - 1/2) dt`.
pub fn gegenbauer_norm(alpha: f64, k: usize) -> Result<f64> {
    let rule = QuadratureRule::gauss_jacobi(alpha, k + EXTRA_NODES)?;
    norm_with(&rule, k)
}

fn norm_with(rule: &QuadratureRule, k: usize) -> Result<f64> {
    if 2 * k > rule.exact_degree() {
        return Err(Error::QuadratureOrder {
            nodes: rule.len(),
            degree: 2 * k,
        });
    }
    Ok(rule.integrate(|t| gegenbauer_unchecked(rule.alpha, k, t).powi(2)))
}

/// Gegenbauer polynomials of a fixed order up to `max_degree`, with their
/// norms and a Gauss–Jacobi rule exact for every product of two of them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GegenbauerBasis {
    pub alpha: f64,
    pub max_degree: usize,
    pub norms: Vec<f64>,
    pub quad: QuadratureRule,
    /// `values[j][k] = P_k(nodes[j])`.
    #[serde(skip)]
    values: Vec<Vec<f64>>,
}

impl GegenbauerBasis {
    pub fn new(alpha: f64, max_degree: usize) -> Result<Self> {
        Self::with_nodes(alpha, max_degree, max_degree + EXTRA_NODES)
    }

    pub fn with_nodes(alpha: f64, max_degree: usize, nodes: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let quad = QuadratureRule::gauss_jacobi(alpha, nodes)?;
        if 2 * max_degree > quad.exact_degree() {
            return Err(Error::QuadratureOrder {
                nodes,
                degree: 2 * max_degree,
            });
        }
        let values: Vec<Vec<f64>> = quad
            .nodes
            .iter()
            .map(|&t| {
                let mut row = vec![0.0; max_degree + 1];
                gegenbauer_all(alpha, t, &mut row);
                row
            })
            .collect();
        let mut norms = vec![0.0; max_degree + 1];
        for (row, w) in values.iter().zip(&quad.weights) {
            for (n, p) in norms.iter_mut().zip(row) {
                *n += w * p * p;
            }
        }
        Ok(Self {
            alpha,
            max_degree,
            norms,
            quad,
            values,
        })
    }

    pub fn eval(&self, d: usize, t: f64) -> Result<f64> {
        eval_gegenbauer(self.alpha, d, t)
    }

    pub fn norm(&self, k: usize) -> Result<f64> {
        self.norms.get(k).copied().ok_or(Error::QuadratureOrder {
            nodes: self.quad.len(),
            degree: 2 * k,
        })
    }

    /// Coefficients `c_k = ∫ f P_k w / p_{α,k}` for `k = 0..=max_degree`.
    pub fn expand<F: FnMut(f64) -> f64>(&self, mut f: F) -> Vec<f64> {
        let samples: Vec<f64> = self.quad.nodes.iter().map(|&t| f(t)).collect();
        self.expand_samples(&samples)
    }

    /// Like [`Self::expand`], from `f` already evaluated at the rule's nodes.
    pub fn expand_samples(&self, samples: &[f64]) -> Vec<f64> {
        debug_assert_eq!(samples.len(), self.quad.len());
        let mut c = vec![0.0; self.max_degree + 1];
        for ((row, w), fx) in self.values.iter().zip(&self.quad.weights).zip(samples) {
            for (ck, p) in c.iter_mut().zip(row) {
                *ck += w * fx * p;
            }
        }
        c.iter_mut().zip(&self.norms).for_each(|(ck, n)| *ck /= n);
        c
    }

    /// `Σ_k c_k P_k(t)`.
    pub fn synthesize(&self, coefficients: &[f64], t: f64) -> f64 {
        gegenbauer_series(self.alpha, coefficients, t)
    }
}

/// Expands `f` on `[-1, 1]` in `P_0^α, …, P_{d_max}^α`.
pub fn expand_univariate<F: FnMut(f64) -> f64>(f: F, alpha: f64, d_max: usize) -> Result<Vec<f64>> {
    Ok(GegenbauerBasis::new(alpha, d_max)?.expand(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use statrs::function::gamma::ln_gamma;
    use std::f64::consts::PI;

    /// Closed-form `p_{α,k} = π 2^(1-2α) Γ(k+2α) / (k! (k+α) Γ(α)²)`.
    fn norm_closed_form(alpha: f64, k: usize) -> f64 {
        let kf = k as f64;
        let ln = PI.ln() + (1.0 - 2.0 * alpha) * 2f64.ln() + ln_gamma(kf + 2.0 * alpha)
            - ln_gamma(kf + 1.0)
            - (kf + alpha).ln()
            - 2.0 * ln_gamma(alpha);
        ln.exp()
    }

    #[test]
    fn base_cases() {
        assert_eq!(eval_gegenbauer(1.0, 1, 0.5).unwrap(), 1.0);
        assert_eq!(eval_gegenbauer(0.7, 0, -0.3).unwrap(), 1.0);
        assert_relative_eq!(eval_gegenbauer(0.5, 2, 1.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(eval_gegenbauer(1.0, 3, 1.1).is_err());
        assert!(eval_gegenbauer(1.0, 3, f64::NAN).is_err());
        assert!(eval_gegenbauer(1.0, 3, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn closed_forms_degree_two_three() {
        // P_2 = 2α(α+1)t² - α,  P_3 = (4/3)α(α+1)(α+2)t³ - 2α(α+1)t
        for alpha in [0.25, 0.5, 1.0, 1.7, 3.0] {
            for i in 0..=40 {
                let t = -1.0 + i as f64 * 0.05;
                let p2 = 2.0 * alpha * (alpha + 1.0) * t * t - alpha;
                let p3 =
                    4.0 / 3.0 * alpha * (alpha + 1.0) * (alpha + 2.0) * t.powi(3) - 2.0 * alpha * (alpha + 1.0) * t;
                assert!((eval_gegenbauer(alpha, 2, t).unwrap() - p2).abs() < 1e-12);
                assert!((eval_gegenbauer(alpha, 3, t).unwrap() - p3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn norms() {
        assert_relative_eq!(gegenbauer_norm(0.5, 0).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(gegenbauer_norm(0.5, 1).unwrap(), 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(gegenbauer_norm(1.0, 0).unwrap(), PI / 2.0, max_relative = 1e-12);
        for alpha in [0.5, 0.75, 1.5, 3.0] {
            let basis = GegenbauerBasis::new(alpha, 20).unwrap();
            for k in 0..=20 {
                assert_relative_eq!(basis.norm(k).unwrap(), norm_closed_form(alpha, k), max_relative = 1e-10);
            }
            assert!(basis.norm(21).is_err());
        }
    }

    #[test]
    fn insufficient_quadrature() {
        assert!(matches!(
            GegenbauerBasis::with_nodes(1.0, 10, 5),
            Err(Error::QuadratureOrder { .. })
        ));
        let rule = QuadratureRule::gauss_jacobi(1.0, 3).unwrap();
        assert!(norm_with(&rule, 3).is_err());
    }

    #[test]
    fn expand_examples() {
        let c = expand_univariate(|t| t * t, 0.5, 2).unwrap();
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(c[1].abs() < 1e-12);
        assert!((c[2] - 2.0 / 3.0).abs() < 1e-12);

        let alpha = 1.3;
        let c = expand_univariate(|t| gegenbauer_unchecked(alpha, 3, t), alpha, 6).unwrap();
        for (k, ck) in c.iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((ck - want).abs() < 1e-10);
        }

        let c = expand_univariate(|_| 1.0, 2.0, 5).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn orthogonality() {
        for alpha in [0.5, 1.0, 1.5, 3.0] {
            let basis = GegenbauerBasis::new(alpha, 20).unwrap();
            for i in 0..=20 {
                for j in 0..i {
                    let ip = basis
                        .quad
                        .integrate(|t| gegenbauer_unchecked(alpha, i, t) * gegenbauer_unchecked(alpha, j, t));
                    assert!(ip.abs() < 1e-10 * basis.norms[i].max(basis.norms[j]));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn expansion_roundtrip(
            alpha in 0.25f64..4.0,
            coeffs in prop::collection::vec(-2.0f64..2.0, 1..16),
            ts in prop::collection::vec(-1.0f64..=1.0, 100),
        ) {
            // random polynomial given by its monomial coefficients
            let g = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
            let basis = GegenbauerBasis::new(alpha, coeffs.len() - 1).unwrap();
            let c = basis.expand(g);
            for &t in &ts {
                let want = g(t);
                let got = basis.synthesize(&c, t);
                let scale = coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
                prop_assert!((got - want).abs() <= 1e-9 * scale, "t={} got={} want={}", t, got, want);
            }
        }
    }
}
