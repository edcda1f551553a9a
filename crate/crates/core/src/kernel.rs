//! Kernels on the sphere and on the projection bundle `S^{n-1} × (S^{n-1})^r`,
//! Gram assembly, and sampling-based verification of positive definiteness
//! and `O_n`-invariance.
//!
//! Verification here is randomized and one-sided. A passing check is
//! evidence, never a proof. A failing p.d. check comes with the point set
//! whose Gram matrix has the offending negative eigenvalue, which *is* a
//! certificate that the kernel is not p.d.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::gegenbauer_unchecked;
use crate::sphere::{random_orthogonal, random_unit, stream_rng, SphereConfig};

/// Default relative tolerance on the smallest Gram eigenvalue.
pub const DEFAULT_PD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Kernels on `S^{n-1}`.
    Sphere { n: usize },
    /// Kernels on `π: S^{n-1} × (S^{n-1})^r → (S^{n-1})^r`, evaluated as `K_Z(x, y)`.
    Bundle { n: usize, r: usize },
}

impl Domain {
    pub fn n(&self) -> usize {
        match *self {
            Domain::Sphere { n } | Domain::Bundle { n, .. } => n,
        }
    }

    pub fn r(&self) -> usize {
        match *self {
            Domain::Sphere { .. } => 0,
            Domain::Bundle { r, .. } => r,
        }
    }
}

/// A symmetric kernel. Implementations must be free of interior mutability
/// so that evaluators can run concurrently.
pub trait Kernel: Send + Sync {
    fn domain(&self) -> Domain;

    /// `K(x, y)` on the sphere, or `K_Z(x, y)` on the bundle (then `z` is required).
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64>;
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        (**self).eval(x, y, z)
    }
}

impl<K: Kernel + ?Sized> Kernel for Box<K> {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        (**self).eval(x, y, z)
    }
}

impl<K: Kernel + ?Sized> Kernel for Arc<K> {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        (**self).eval(x, y, z)
    }
}

pub type SharedKernel = Arc<dyn Kernel>;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Kernel on `S^{n-1}` from a closure `(x, y) ↦ K(x, y)`.
pub struct SphereFn<F> {
    n: usize,
    f: F,
}

impl<F> SphereFn<F>
where
    F: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> Kernel for SphereFn<F>
where
    F: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    fn domain(&self) -> Domain {
        Domain::Sphere { n: self.n }
    }
    fn eval(&self, x: &[f64], y: &[f64], _z: Option<&SphereConfig>) -> Result<f64> {
        Ok((self.f)(x, y))
    }
}

/// Zonal kernel `κ(xᵀy)` on `S^{n-1}`.
pub struct ZonalKernel<F> {
    n: usize,
    profile: F,
}

impl<F> ZonalKernel<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(n: usize, profile: F) -> Self {
        Self { n, profile }
    }
}

impl<F> Kernel for ZonalKernel<F>
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn domain(&self) -> Domain {
        Domain::Sphere { n: self.n }
    }
    fn eval(&self, x: &[f64], y: &[f64], _z: Option<&SphereConfig>) -> Result<f64> {
        Ok((self.profile)(dot(x, y).clamp(-1.0, 1.0)))
    }
}

/// Bundle kernel from a closure `(x, y, Z) ↦ K_Z(x, y)`.
pub struct BundleFn<F> {
    n: usize,
    r: usize,
    f: F,
}

impl<F> BundleFn<F>
where
    F: Fn(&[f64], &[f64], &SphereConfig) -> Result<f64> + Send + Sync,
{
    pub fn new(n: usize, r: usize, f: F) -> Self {
        Self { n, r, f }
    }
}

impl<F> Kernel for BundleFn<F>
where
    F: Fn(&[f64], &[f64], &SphereConfig) -> Result<f64> + Send + Sync,
{
    fn domain(&self) -> Domain {
        Domain::Bundle { n: self.n, r: self.r }
    }
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        let z = z.ok_or_else(|| Error::Domain("bundle kernel evaluated without a base point Z".into()))?;
        (self.f)(x, y, z)
    }
}

/// A sphere kernel viewed as a bundle kernel that ignores `Z`.
pub struct Lifted<K> {
    inner: K,
    r: usize,
}

impl<K: Kernel> Lifted<K> {
    pub fn new(inner: K, r: usize) -> Result<Self> {
        match inner.domain() {
            Domain::Sphere { .. } => Ok(Self { inner, r }),
            Domain::Bundle { .. } => Err(Error::Domain("kernel already lives on a bundle".into())),
        }
    }
}

impl<K: Kernel> Kernel for Lifted<K> {
    fn domain(&self) -> Domain {
        Domain::Bundle {
            n: self.inner.domain().n(),
            r: self.r,
        }
    }
    fn eval(&self, x: &[f64], y: &[f64], _z: Option<&SphereConfig>) -> Result<f64> {
        self.inner.eval(x, y, None)
    }
}

/// `xᵀy`.
pub fn dot_kernel(n: usize) -> impl Kernel {
    SphereFn::new(n, dot)
}

/// `-xᵀy`, a kernel that is not p.d.
pub fn neg_dot_kernel(n: usize) -> impl Kernel {
    SphereFn::new(n, |x: &[f64], y: &[f64]| -dot(x, y))
}

pub fn const_kernel(n: usize, value: f64) -> impl Kernel {
    SphereFn::new(n, move |_: &[f64], _: &[f64]| value)
}

/// `P_k^{n/2-1}(xᵀy)`.
pub fn gegenbauer_kernel(n: usize, k: usize) -> impl Kernel {
    let alpha = n as f64 / 2.0 - 1.0;
    ZonalKernel::new(n, move |t| gegenbauer_unchecked(alpha, k, t))
}

/// `x₁y₁`, p.d. but not `O_n`-invariant.
pub fn coordinate_kernel(n: usize) -> impl Kernel {
    SphereFn::new(n, |x: &[f64], y: &[f64]| x[0] * y[0])
}

/// Pointwise sum of two kernels on the same domain.
pub struct KernelSum<A, B>(A, B);

/// Pointwise (Schur) product of two kernels on the same domain.
pub struct KernelProduct<A, B>(A, B);

fn same_domain(a: Domain, b: Domain) -> Result<()> {
    if a != b {
        return Err(Error::Domain(format!("kernel domains differ: {a:?} vs {b:?}")));
    }
    Ok(())
}

pub fn kernel_sum<A: Kernel, B: Kernel>(a: A, b: B) -> Result<KernelSum<A, B>> {
    same_domain(a.domain(), b.domain())?;
    Ok(KernelSum(a, b))
}

pub fn kernel_product<A: Kernel, B: Kernel>(a: A, b: B) -> Result<KernelProduct<A, B>> {
    same_domain(a.domain(), b.domain())?;
    Ok(KernelProduct(a, b))
}

impl<A: Kernel, B: Kernel> Kernel for KernelSum<A, B> {
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        Ok(self.0.eval(x, y, z)? + self.1.eval(x, y, z)?)
    }
}

impl<A: Kernel, B: Kernel> Kernel for KernelProduct<A, B> {
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn eval(&self, x: &[f64], y: &[f64], z: Option<&SphereConfig>) -> Result<f64> {
        Ok(self.0.eval(x, y, z)? * self.1.eval(x, y, z)?)
    }
}

fn check_base(domain: Domain, z: Option<&SphereConfig>) -> Result<()> {
    match (domain, z) {
        (Domain::Sphere { .. }, _) => Ok(()),
        (Domain::Bundle { .. }, None) => Err(Error::Domain("bundle kernel needs a base configuration Z".into())),
        (Domain::Bundle { n, r }, Some(cfg)) => {
            if cfg.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: cfg.n(),
                });
            }
            if cfg.r() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: cfg.r(),
                });
            }
            if !cfg.full_rank() {
                return Err(Error::RankDeficient {
                    smallest: cfg.smallest_singular_value(),
                    tol: cfg.tol_rank(),
                });
            }
            Ok(())
        }
    }
}

/// `G[i][j] = K(p_i, p_j[, Z])`; the upper triangle is evaluated and mirrored.
pub fn gram<K: Kernel + ?Sized>(kernel: &K, points: &[Vec<f64>], z: Option<&SphereConfig>) -> Result<DMatrix<f64>> {
    let domain = kernel.domain();
    check_base(domain, z)?;
    let n = domain.n();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let m = points.len();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i..m)
                .map(|j| kernel.eval(&points[i], &points[j], z))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut g = DMatrix::zeros(m, m);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            g[(i, i + off)] = v;
            g[(i + off, i)] = v;
        }
    }
    Ok(g)
}

/// Eigen-summary of one Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub m: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `tol · max(1, max_eigenvalue)`.
    pub scaled_tol: f64,
    pub pass: bool,
}

impl GramReport {
    pub fn from_gram(g: &DMatrix<f64>, tol: f64) -> Self {
        let m = g.nrows();
        if m == 0 {
            return Self {
                m,
                min_eigenvalue: 0.0,
                max_eigenvalue: 0.0,
                scaled_tol: tol,
                pass: true,
            };
        }
        let eig = g.clone().symmetric_eigenvalues();
        let min = eig.min();
        let max = eig.max();
        let scaled_tol = tol * max.max(1.0);
        Self {
            m,
            min_eigenvalue: min,
            max_eigenvalue: max,
            scaled_tol,
            pass: min >= -scaled_tol,
        }
    }
}

/// Point set whose Gram matrix certifies a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub min_eigenvalue: f64,
    pub points: Vec<Vec<f64>>,
    /// Columns of `Z` for bundle kernels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdCheck {
    pub trials: usize,
    pub points_per_trial: usize,
    pub seed: u64,
    pub tol: f64,
    pub pass: bool,
    pub reports: Vec<GramReport>,
    /// The trial with the most negative eigenvalue, when any trial failed.
    pub witness: Option<Witness>,
}

pub(crate) fn columns(cfg: &SphereConfig) -> Vec<Vec<f64>> {
    cfg.z().column_iter().map(|c| c.iter().copied().collect()).collect()
}

/// Randomized p.d. test: `trials` Gram matrices of `m` uniform sphere points
/// (and a fresh full-rank `Z` per trial for bundle kernels).
pub fn check_pd<K: Kernel + ?Sized>(kernel: &K, trials: usize, m: usize, seed: u64, tol: f64) -> Result<PdCheck> {
    if m < 2 {
        return Err(Error::Domain("p.d. check needs at least 2 points per trial".into()));
    }
    let domain = kernel.domain();
    let n = domain.n();
    let outcomes: Vec<(GramReport, Vec<Vec<f64>>, Option<SphereConfig>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial as u64);
            let z = match domain {
                Domain::Sphere { .. } => None,
                Domain::Bundle { n, r } => Some(SphereConfig::random_full_rank(n, r, &mut rng)?),
            };
            let points: Vec<Vec<f64>> = (0..m).map(|_| random_unit(n, &mut rng)).collect();
            let g = gram(kernel, &points, z.as_ref())?;
            Ok((GramReport::from_gram(&g, tol), points, z))
        })
        .collect::<Result<_>>()?;
    let pass = outcomes.iter().all(|(r, _, _)| r.pass);
    let witness = outcomes
        .iter()
        .enumerate()
        .filter(|(_, (r, _, _))| !r.pass)
        .min_by(|a, b| a.1 .0.min_eigenvalue.total_cmp(&b.1 .0.min_eigenvalue))
        .map(|(trial, (r, points, z))| Witness {
            trial,
            min_eigenvalue: r.min_eigenvalue,
            points: points.clone(),
            z: z.as_ref().map(columns),
        });
    Ok(PdCheck {
        trials,
        points_per_trial: m,
        seed,
        tol,
        pass,
        reports: outcomes.into_iter().map(|(r, _, _)| r).collect(),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub draws: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_residual: f64,
    pub pass: bool,
}

fn apply(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Max of `|K(Mx, My, MZ) - K(x, y, Z)|` over random `x, y, Z` and `M ∈ O_n`.
/// Sphere kernels are tested with `M` acting on `x, y` only.
pub fn check_invariance<K: Kernel + ?Sized>(kernel: &K, draws: usize, seed: u64, tol: f64) -> Result<InvarianceReport> {
    let domain = kernel.domain();
    let n = domain.n();
    let residuals: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let x = random_unit(n, &mut rng);
            let y = random_unit(n, &mut rng);
            let m = random_orthogonal(n, &mut rng);
            let (mx, my) = (apply(&m, &x), apply(&m, &y));
            match domain {
                Domain::Sphere { .. } => Ok((kernel.eval(&mx, &my, None)? - kernel.eval(&x, &y, None)?).abs()),
                Domain::Bundle { r, .. } => {
                    let z = SphereConfig::random_full_rank(n, r, &mut rng)?;
                    let mz = z.act(&m)?;
                    Ok((kernel.eval(&mx, &my, Some(&mz))? - kernel.eval(&x, &y, Some(&z))?).abs())
                }
            }
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

/// Max of `|K(Mx, My) - K(x, y)|` over random `x, y` and `M ∈ Stab_{O_n}(Z)`
/// for the fixed configuration `cfg`.
pub fn check_stabilizer_invariance<K: Kernel + ?Sized>(
    kernel: &K,
    cfg: &SphereConfig,
    draws: usize,
    seed: u64,
    tol: f64,
) -> Result<InvarianceReport> {
    let n = cfg.n();
    let z = match kernel.domain() {
        Domain::Sphere { .. } => None,
        Domain::Bundle { .. } => Some(cfg),
    };
    check_base(kernel.domain(), z)?;
    let residuals: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let x = random_unit(n, &mut rng);
            let y = random_unit(n, &mut rng);
            let m = cfg.random_stabilizer(&mut rng)?;
            Ok((kernel.eval(&apply(&m, &x), &apply(&m, &y), z)? - kernel.eval(&x, &y, z)?).abs())
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

/// Monte-Carlo estimate of `∫∫ K(x, y) g(x) g(y) dω(x) dω(y)` over the
/// normalized surface measure. A low-precision companion to [`check_pd`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BochnerEstimate {
    pub samples: usize,
    pub value: f64,
    pub std_error: f64,
    /// `value ≥ -3·std_error`.
    pub pass: bool,
}

pub fn bochner_estimate<K, G>(
    kernel: &K,
    z: Option<&SphereConfig>,
    g: G,
    samples: usize,
    seed: u64,
) -> Result<BochnerEstimate>
where
    K: Kernel + ?Sized,
    G: Fn(&[f64]) -> f64 + Sync,
{
    check_base(kernel.domain(), z)?;
    if samples < 2 {
        return Err(Error::Domain("Monte-Carlo estimate needs at least 2 samples".into()));
    }
    let n = kernel.domain().n();
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let x = random_unit(n, &mut rng);
                let y = random_unit(n, &mut rng);
                let v = kernel.eval(&x, &y, z)? * g(&x) * g(&y);
                s += v;
                s2 += v * v;
            }
            Ok((s, s2))
        })
        .collect::<Result<_>>()?;
    let (s, s2) = sums.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = samples as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    let std_error = (var / nf).sqrt();
    Ok(BochnerEstimate {
        samples,
        value: mean,
        std_error,
        pass: mean >= -3.0 * std_error,
    })
}

/// Uniform points on `S^{n-1}` drawn from `rng`.
pub fn random_points<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..m).map(|_| random_unit(n, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::rng_from_seed;

    fn basis(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect()
    }

    #[test]
    fn gram_examples() {
        let g = gram(&dot_kernel(3), &basis(3), None).unwrap();
        assert_eq!(g, DMatrix::identity(3, 3));

        let pts = random_points(3, 6, &mut rng_from_seed(1));
        let g = gram(&const_kernel(3, 1.0), &pts, None).unwrap();
        assert_eq!(g, DMatrix::from_element(6, 6, 1.0));
        let rep = GramReport::from_gram(&g, DEFAULT_PD_TOL);
        assert!(rep.pass);
        assert!((rep.max_eigenvalue - 6.0).abs() < 1e-12);

        let pts = random_points(3, 50, &mut rng_from_seed(2));
        let g = gram(&gegenbauer_kernel(3, 2), &pts, None).unwrap();
        assert!(GramReport::from_gram(&g, 0.0).min_eigenvalue >= -1e-8);
        assert_eq!(g, g.transpose());
    }

    #[test]
    fn gram_domain_errors() {
        assert!(matches!(
            gram(&dot_kernel(3), &[vec![1.0, 0.0]], None),
            Err(Error::DimensionMismatch { .. })
        ));
        let bundle = Lifted::new(dot_kernel(3), 1).unwrap();
        assert!(gram(&bundle, &basis(3), None).is_err());
        let cfg = SphereConfig::random_full_rank(4, 1, &mut rng_from_seed(3)).unwrap();
        assert!(gram(&bundle, &basis(3), Some(&cfg)).is_err());
    }

    #[test]
    fn pd_examples() {
        let mut sum: Box<dyn Kernel> = Box::new(gegenbauer_kernel(3, 0));
        for k in 1..=5 {
            sum = Box::new(kernel_sum(sum, gegenbauer_kernel(3, k)).unwrap());
        }
        assert!(check_pd(&sum, 20, 40, 7, DEFAULT_PD_TOL).unwrap().pass);

        let neg = check_pd(&neg_dot_kernel(3), 5, 10, 7, DEFAULT_PD_TOL).unwrap();
        assert!(!neg.pass);
        let w = neg.witness.unwrap();
        // the witness must reproduce the negative eigenvalue
        let g = gram(&neg_dot_kernel(3), &w.points, None).unwrap();
        assert!(GramReport::from_gram(&g, DEFAULT_PD_TOL).min_eigenvalue < -0.5);

        assert!(check_pd(&const_kernel(3, 0.0), 3, 10, 7, DEFAULT_PD_TOL).unwrap().pass);
        assert!(check_pd(&dot_kernel(3), 1, 1, 0, DEFAULT_PD_TOL).is_err());
    }

    #[test]
    fn two_point_neg_dot() {
        // brute force: Gram of -xᵀy at {e₁, -e₁} is [[-1, 1], [1, -1]] with eigenvalues {0, -2}
        let pts = vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]];
        let rep = GramReport::from_gram(&gram(&neg_dot_kernel(3), &pts, None).unwrap(), DEFAULT_PD_TOL);
        assert!((rep.min_eigenvalue + 2.0).abs() < 1e-12);
        assert!(!rep.pass);
    }

    #[test]
    fn check_pd_is_reproducible() {
        let a = check_pd(&gegenbauer_kernel(4, 3), 4, 12, 99, DEFAULT_PD_TOL).unwrap();
        let b = check_pd(&gegenbauer_kernel(4, 3), 4, 12, 99, DEFAULT_PD_TOL).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn algebra() {
        let k1 = gegenbauer_kernel(4, 2);
        let k2 = ZonalKernel::new(4, |t: f64| t.exp());
        let s = kernel_sum(&k1, &k2).unwrap();
        let p = kernel_product(&k1, &k2).unwrap();
        assert!(check_pd(&s, 10, 30, 1, DEFAULT_PD_TOL).unwrap().pass);
        assert!(check_pd(&p, 10, 30, 2, DEFAULT_PD_TOL).unwrap().pass);

        let zero = const_kernel(4, 0.0);
        let k_plus_0 = kernel_sum(&k2, &zero).unwrap();
        let pts = random_points(4, 20, &mut rng_from_seed(4));
        assert_eq!(gram(&k_plus_0, &pts, None).unwrap(), gram(&k2, &pts, None).unwrap());

        assert!(kernel_sum(dot_kernel(3), dot_kernel(4)).is_err());
    }

    #[test]
    fn schur_product_of_grams() {
        let mut rng = rng_from_seed(8);
        for trial in 0..10 {
            let pts = random_points(5, 30, &mut rng);
            let g1 = gram(&gegenbauer_kernel(5, trial % 4), &pts, None).unwrap();
            let g2 = gram(&gegenbauer_kernel(5, 1 + trial % 3), &pts, None).unwrap();
            let prod = g1.component_mul(&g2);
            let rep = GramReport::from_gram(&prod, 1e-8);
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn invariance_examples() {
        let lifted_dot = Lifted::new(dot_kernel(4), 2).unwrap();
        let rep = check_invariance(&lifted_dot, 200, 3, 1e-12).unwrap();
        assert!(rep.pass, "{rep:?}");

        let coord = Lifted::new(coordinate_kernel(4), 2).unwrap();
        assert!(!check_invariance(&coord, 50, 3, 1e-6).unwrap().pass);

        let bundle = BundleFn::new(4, 1, |x: &[f64], y: &[f64], z: &SphereConfig| {
            let zx = z.coordinates(x)?;
            let zy = z.coordinates(y)?;
            Ok(zx[0] * zy[0] * dot(x, y))
        });
        assert!(check_invariance(&bundle, 200, 5, 1e-12).unwrap().pass);
    }

    #[test]
    fn stabilizer_invariance() {
        let cfg = SphereConfig::random_full_rank(5, 2, &mut rng_from_seed(12)).unwrap();
        let zcol: Vec<f64> = cfg.z().column(0).iter().copied().collect();
        let k = SphereFn::new(5, move |x: &[f64], y: &[f64]| {
            dot(x, &zcol) * dot(y, &zcol) + dot(x, y).powi(2)
        });
        assert!(check_stabilizer_invariance(&k, &cfg, 100, 1, 1e-12).unwrap().pass);
        assert!(
            !check_stabilizer_invariance(&coordinate_kernel(5), &cfg, 100, 1, 1e-6)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn bochner_cross_check() {
        // ∫∫ (1 + xᵀy)(1 + x₁)(1 + y₁) = 1 + (E[x₁²])² = 1 + 1/9 on S²
        let k = ZonalKernel::new(3, |t| 1.0 + t);
        let est = bochner_estimate(&k, None, |x| 1.0 + x[0], 400_000, 5).unwrap();
        assert!(est.pass);
        assert!((est.value - 10.0 / 9.0).abs() < 1e-2 * 10.0 / 9.0, "{est:?}");

        // -xᵀy with g = x₁ gives -1/9 and must be flagged
        let est = bochner_estimate(&neg_dot_kernel(3), None, |x| x[0], 400_000, 5).unwrap();
        assert!(!est.pass);
        assert!((est.value + 1.0 / 9.0).abs() < 1e-2 / 9.0 * 2.0, "{est:?}");
    }
}
