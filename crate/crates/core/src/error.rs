use thiserror::Error;

/// Errors raised by the kernel, geometry and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank deficient configuration: smallest singular value {smallest:.3e} <= {tol:.3e}")]
    RankDeficient { smallest: f64, tol: f64 },

    #[error("singular point: perpendicular norm {norm:.3e} <= {tol:.3e}")]
    Singular { norm: f64, tol: f64 },

    #[error("quadrature rule with {nodes} nodes cannot integrate degree {degree} exactly")]
    QuadratureOrder { nodes: usize, degree: usize },

    #[error("matrix is not orthogonal: deviation {deviation:.3e}")]
    NotOrthogonal { deviation: f64 },

    #[error("kernel is not invariant: max residual {residual:.3e} >= {tol:.3e}")]
    NotInvariant { residual: f64, tol: f64 },

    #[error("kernel is not positive definite: min eigenvalue {min_eigenvalue:.3e} < -{tol:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64, tol: f64 },

    #[error("ill-conditioned system (condition number {condition:.3e}); use a larger sample set")]
    IllConditioned { condition: f64 },

    #[error("least-squares fit residual {residual:.3e} exceeds {tol:.3e}")]
    FitResidual { residual: f64, tol: f64 },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("certificate refinement failed: max violation {violation:.3e} after {rounds} rounds")]
    Refinement { violation: f64, rounds: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
