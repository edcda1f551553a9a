//! Gauss–Jacobi quadrature for the symmetric weight `(1 - t²)^(α - 1/2)` on `[-1, 1]`.
//!
//! Nodes and weights come from the Golub–Welsch method: the nodes are the
//! eigenvalues of the symmetric Jacobi matrix of the monic Gegenbauer
//! recurrence and the weights are `μ₀ · v₀²` where `v₀` is the first
//! component of the normalized eigenvector and `μ₀` the total mass of the
//! weight.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Smallest order accepted by the polynomial and quadrature routines.
pub const MIN_ALPHA: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `∫_{-1}^{1} (1 - t²)^(α - 1/2) dt = √π Γ(α + 1/2) / Γ(α + 1)`.
pub fn weight_mass(alpha: f64) -> f64 {
    (0.5 * std::f64::consts::PI.ln() + ln_gamma(alpha + 0.5) - ln_gamma(alpha + 1.0)).exp()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < MIN_ALPHA {
        return Err(Error::Domain(format!(
            "order alpha = {alpha} is below the supported minimum {MIN_ALPHA}"
        )));
    }
    Ok(())
}

impl QuadratureRule {
    /// Builds the `m`-node rule, exact for polynomials of degree `2m - 1`.
    pub fn gauss_jacobi(alpha: f64, m: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if m == 0 {
            return Err(Error::Domain("quadrature rule needs at least one node".into()));
        }
        let mut jacobi = DMatrix::<f64>::zeros(m, m);
        for k in 1..m {
            let kf = k as f64;
            let beta = kf * (kf + 2.0 * alpha - 1.0) / (4.0 * (kf + alpha) * (kf + alpha - 1.0));
            let off = beta.sqrt();
            jacobi[(k, k - 1)] = off;
            jacobi[(k - 1, k)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mass = weight_mass(alpha);
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|j| {
                let v0 = eig.eigenvectors[(0, j)];
                (eig.eigenvalues[j], mass * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { alpha, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly against the weight.
    pub fn exact_degree(&self) -> usize {
        2 * self.len() - 1
    }

    /// `∫ f(t) (1 - t²)^(α - 1/2) dt`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}
