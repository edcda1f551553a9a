//! Geometry of `S^{n-1}` relative to a configuration `Z = [z_1, …, z_r]` of
//! unit vectors: projectors onto `R(Z)` and its complement, the coordinate
//! maps `T₁`/`T₂` between the sphere and `S^{n-r-1} × B_Z`, stabilizer
//! elements, and seeded samplers.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative singular-value threshold below which `Z` counts as rank deficient.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Minimum `‖Π_Z^⊥ x‖` accepted by maps that divide by it.
pub const DEFAULT_PERP_TOL: f64 = 1e-8;

const UNIT_TOL: f64 = 1e-10;
const BALL_SLACK: f64 = 1e-12;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for sub-task `stream` of a seeded run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `count` i.i.d. uniform points on `S^{n-1}`, reproducible from `seed`.
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::Domain("sphere dimension n must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..count).map(|_| random_unit(n, &mut rng)).collect())
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` folded into `Q`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn sample_orthogonal(n: usize, seed: u64) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::Domain("matrix size n must be at least 1".into()));
    }
    Ok(random_orthogonal(n, &mut rng_from_seed(seed)))
}

/// Largest entrywise deviation of `MᵀM` from the identity.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let mtm = m.transpose() * m;
    let id = DMatrix::<f64>::identity(m.ncols(), m.ncols());
    (mtm - id).amax()
}

/// Projectors onto `R(Z)` and `R(Z)^⊥` plus an orthonormal basis of `R(Z)^⊥`.
#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub pi: DMatrix<f64>,
    pub pi_perp: DMatrix<f64>,
    /// `n × (n - r)`, columns orthonormal and spanning `R(Z)^⊥`.
    pub ort: DMatrix<f64>,
}

#[derive(Debug, Clone)]
struct Factors {
    gram_inv: DMatrix<f64>,
    /// `Z (ZᵀZ)⁻¹`, the matrix of `γ_Z`.
    gamma: DMatrix<f64>,
    projectors: ProjectorPair,
}

/// An `n × r` matrix of unit columns together with its cached factors.
#[derive(Debug, Clone)]
pub struct SphereConfig {
    n: usize,
    z: DMatrix<f64>,
    tol_rank: f64,
    tol_perp: f64,
    smallest_singular_value: f64,
    full_rank: bool,
    factors: Option<Factors>,
}

impl SphereConfig {
    /// Validates unit columns and precomputes projectors when `Z` has full rank.
    pub fn new(z: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(z, DEFAULT_RANK_TOL, DEFAULT_PERP_TOL)
    }

    /// `rank_tol` is relative to the largest singular value of `Z`.
    pub fn with_tolerances(z: DMatrix<f64>, rank_tol: f64, tol_perp: f64) -> Result<Self> {
        let (n, r) = z.shape();
        if n == 0 {
            return Err(Error::Domain("ambient dimension n must be at least 1".into()));
        }
        if r > n {
            return Err(Error::Domain(format!("{r} columns exceed ambient dimension {n}")));
        }
        for (j, col) in z.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - 1.0).abs() > 1e-12 || !norm.is_finite() {
                return Err(Error::Domain(format!("column {j} has norm {norm}, expected 1")));
            }
        }
        let (smallest, tol_rank) = if r == 0 {
            (f64::INFINITY, 0.0)
        } else {
            let sv = z.clone().singular_values();
            let max = sv.max();
            (sv.min(), rank_tol * max)
        };
        let full_rank = smallest > tol_rank;
        let mut cfg = Self {
            n,
            z,
            tol_rank,
            tol_perp,
            smallest_singular_value: smallest,
            full_rank,
            factors: None,
        };
        if full_rank {
            cfg.factors = Some(cfg.build_factors()?);
        }
        Ok(cfg)
    }

    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self> {
        for c in columns {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
        }
        let z = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
        Self::new(z)
    }

    /// `r` uniform random columns on `S^{n-1}`.
    pub fn random<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<Self> {
        let cols: Vec<Vec<f64>> = (0..r).map(|_| random_unit(n, rng)).collect();
        Self::from_columns(n, &cols)
    }

    /// Draws until the sample is full rank (almost surely the first draw).
    pub fn random_full_rank<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Result<Self> {
        for _ in 0..64 {
            let cfg = Self::random(n, r, rng)?;
            if cfg.full_rank {
                return Ok(cfg);
            }
        }
        Err(Error::Domain(format!(
            "could not draw a full-rank configuration with n={n}, r={r}"
        )))
    }

    fn build_factors(&self) -> Result<Factors> {
        let (n, r) = self.z.shape();
        let gram = self.z.transpose() * &self.z;
        let gram_inv = if r == 0 {
            DMatrix::zeros(0, 0)
        } else {
            gram.clone()
                .cholesky()
                .ok_or(Error::RankDeficient {
                    smallest: self.smallest_singular_value,
                    tol: self.tol_rank,
                })?
                .inverse()
        };
        let gamma = &self.z * &gram_inv;
        let pi = &gamma * self.z.transpose();
        let pi_perp = DMatrix::<f64>::identity(n, n) - &pi;
        let ort = if r == 0 {
            DMatrix::identity(n, n)
        } else {
            // Full Householder factor of Z: Q = (Qᵀ I)ᵀ, keep the trailing n - r columns.
            let mut qt = DMatrix::<f64>::identity(n, n);
            self.z.clone().qr().q_tr_mul(&mut qt);
            let q = qt.transpose();
            let mut ort = q.columns(r, n - r).into_owned();
            for mut col in ort.column_iter_mut() {
                if let Some(first) = col.iter().copied().find(|v| v.abs() > 1e-10) {
                    if first < 0.0 {
                        col.neg_mut();
                    }
                }
            }
            ort
        };
        Ok(Factors {
            gram_inv,
            gamma,
            projectors: ProjectorPair { pi, pi_perp, ort },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.z.ncols()
    }

    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn full_rank(&self) -> bool {
        self.full_rank
    }

    pub fn tol_rank(&self) -> f64 {
        self.tol_rank
    }

    pub fn tol_perp(&self) -> f64 {
        self.tol_perp
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.smallest_singular_value
    }

    /// `ZᵀZ`, an element of `Λ^r`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.z.transpose() * &self.z
    }

    fn factors(&self) -> Result<&Factors> {
        self.factors.as_ref().ok_or(Error::RankDeficient {
            smallest: self.smallest_singular_value,
            tol: self.tol_rank,
        })
    }

    pub fn projectors(&self) -> Result<&ProjectorPair> {
        Ok(&self.factors()?.projectors)
    }

    /// The configuration `MZ`.
    pub fn act(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.shape() != (self.n, self.n) {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.nrows(),
            });
        }
        let mut z = m * &self.z;
        // re-normalize away rounding so the unit-column check holds
        for mut col in z.column_iter_mut() {
            let norm = col.norm();
            col /= norm;
        }
        Self::with_tolerances(z, self.tol_rank_rel(), self.tol_perp)
    }

    fn tol_rank_rel(&self) -> f64 {
        if self.r() == 0 {
            DEFAULT_RANK_TOL
        } else {
            let max = self.z.clone().singular_values().max();
            self.tol_rank / max
        }
    }

    fn vector(&self, x: &[f64], len: usize) -> Result<DVector<f64>> {
        if x.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: x.len(),
            });
        }
        Ok(DVector::from_column_slice(x))
    }

    fn unit_vector(&self, x: &[f64], len: usize) -> Result<DVector<f64>> {
        let v = self.vector(x, len)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("expected a unit vector, got norm {norm}")));
        }
        Ok(v)
    }

    /// `Zᵀx`, i.e. `γ_Z⁻¹(Π_Z x)`.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        let x = self.vector(x, self.n)?;
        Ok((self.z.transpose() * x).as_slice().to_vec())
    }

    /// `γ_Z(u) = Z (ZᵀZ)⁻¹ u`.
    pub fn gamma(&self, u: &[f64]) -> Result<Vec<f64>> {
        let u = self.vector(u, self.r())?;
        Ok((&self.factors()?.gamma * u).as_slice().to_vec())
    }

    /// `‖γ_Z(u)‖² = uᵀ (ZᵀZ)⁻¹ u`.
    pub fn gamma_norm_sq(&self, u: &[f64]) -> Result<f64> {
        let u = self.vector(u, self.r())?;
        Ok(u.dot(&(&self.factors()?.gram_inv * &u)))
    }

    /// `φ_Z(v)√(1 - ‖γ_Z(u)‖²) + γ_Z(u)`.
    pub fn map_t1(&self, v: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let f = self.factors()?;
        let v = self.unit_vector(v, self.n - self.r())?;
        let u = self.vector(u, self.r())?;
        let g = &f.gamma * &u;
        let g2 = g.norm_squared();
        if g2.sqrt() > 1.0 + BALL_SLACK {
            return Err(Error::Domain(format!("‖γ_Z(u)‖ = {} exceeds 1", g2.sqrt())));
        }
        let s = (1.0 - g2).max(0.0).sqrt();
        Ok((&f.projectors.ort * v * s + g).as_slice().to_vec())
    }

    /// Inverse of [`Self::map_t1`] off `R(Z)`: returns `(v, u)`.
    pub fn map_t2(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let f = self.factors()?;
        let x = self.unit_vector(x, self.n)?;
        let w = f.projectors.ort.transpose() * &x;
        let norm = w.norm();
        if norm <= self.tol_perp {
            return Err(Error::Singular {
                norm,
                tol: self.tol_perp,
            });
        }
        let u = self.z.transpose() * &x;
        Ok(((w / norm).as_slice().to_vec(), u.as_slice().to_vec()))
    }

    /// `⟨x, y⟩_Z = xᵀy - (Zᵀx)ᵀ (ZᵀZ)⁻¹ (Zᵀy)`.
    pub fn inner_z(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let f = self.factors()?;
        let x = self.vector(x, self.n)?;
        let y = self.vector(y, self.n)?;
        let zx = self.z.transpose() * &x;
        let zy = self.z.transpose() * &y;
        Ok(x.dot(&y) - zx.dot(&(&f.gram_inv * zy)))
    }

    /// `(Π_Z^⊥ x)ᵀ Π_Z^⊥ y`; same value as [`Self::inner_z`].
    pub fn inner_z_projected(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let f = self.factors()?;
        let x = self.vector(x, self.n)?;
        let y = self.vector(y, self.n)?;
        Ok((&f.projectors.pi_perp * x).dot(&(&f.projectors.pi_perp * y)))
    }

    /// `Π_Z^⊥ x`.
    pub fn perp(&self, x: &[f64]) -> Result<Vec<f64>> {
        let f = self.factors()?;
        let x = self.vector(x, self.n)?;
        Ok((&f.projectors.pi_perp * x).as_slice().to_vec())
    }

    /// `Π_Z + Ort(Z) Q Ort(Z)ᵀ`, an element of `Stab_{O_n}(Z)`.
    pub fn stabilizer_element(&self, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let f = self.factors()?;
        let k = self.n - self.r();
        if q.shape() != (k, k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: q.nrows(),
            });
        }
        let deviation = orthogonality_defect(q);
        if deviation > 1e-10 {
            return Err(Error::NotOrthogonal { deviation });
        }
        let p = &f.projectors;
        Ok(&p.pi + &p.ort * q * p.ort.transpose())
    }

    /// Stabilizer element built from a Haar-random `Q ∈ O_{n-r}`.
    pub fn random_stabilizer<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DMatrix<f64>> {
        let q = random_orthogonal(self.n - self.r(), rng);
        self.stabilizer_element(&q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn projector_examples() {
        let cfg = SphereConfig::from_columns(3, &[e(3, 0)]).unwrap();
        let p = cfg.projectors().unwrap();
        assert!((&p.pi - DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 0.0]))).amax() < 1e-15);
        assert!((&p.pi_perp - DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0, 1.0]))).amax() < 1e-15);

        let cfg = SphereConfig::from_columns(3, &[e(3, 0), e(3, 1)]).unwrap();
        let p = cfg.projectors().unwrap();
        assert!((&p.pi - DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]))).amax() < 1e-15);

        let cfg = SphereConfig::from_columns(2, &[e(2, 0), e(2, 0)]).unwrap();
        assert!(!cfg.full_rank());
        assert!(matches!(cfg.projectors(), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn rejects_non_unit_columns() {
        assert!(SphereConfig::from_columns(3, &[vec![1.0, 1.0, 0.0]]).is_err());
        assert!(SphereConfig::from_columns(3, &[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn t1_t2_examples() {
        let cfg = SphereConfig::from_columns(3, &[e(3, 0)]).unwrap();
        let x = cfg.map_t1(&[0.0, 1.0], &[0.0]).unwrap();
        assert!((x[0]).abs() < 1e-15 && (x[1]).abs() < 1e-15 && (x[2] - 1.0).abs() < 1e-15);
        let x = cfg.map_t1(&[1.0, 0.0], &[1.0]).unwrap();
        assert_eq!(x, vec![1.0, 0.0, 0.0]);
        assert!(cfg.map_t1(&[1.0, 0.0], &[1.1]).is_err());

        let (v, u) = cfg.map_t2(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(u, vec![0.0]);
        assert!((v[0]).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert!(matches!(cfg.map_t2(&e(3, 0)), Err(Error::Singular { .. })));

        let cfg = SphereConfig::from_columns(4, &[e(4, 0), e(4, 1)]).unwrap();
        let (v, u) = cfg.map_t2(&[0.6, 0.0, 0.8, 0.0]).unwrap();
        assert_relative_eq!(u[0], 0.6, epsilon = 1e-15);
        assert_eq!(u[1], 0.0);
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-15);
        assert!(v[1].abs() < 1e-15);
    }

    #[test]
    fn inner_z_examples() {
        let cfg = SphereConfig::from_columns(3, &[e(3, 0)]).unwrap();
        assert_eq!(cfg.inner_z(&e(3, 1), &e(3, 1)).unwrap(), 1.0);
        assert_eq!(cfg.inner_z(&e(3, 0), &[0.3, -0.2, 0.9]).unwrap(), 0.0);
        let mut rng = rng_from_seed(11);
        for _ in 0..1000 {
            let n = rng.random_range(3..9);
            let r = rng.random_range(1..n - 1);
            let cfg = SphereConfig::random_full_rank(n, r, &mut rng).unwrap();
            let x = random_unit(n, &mut rng);
            let y = random_unit(n, &mut rng);
            let a = cfg.inner_z(&x, &y).unwrap();
            let b = cfg.inner_z_projected(&x, &y).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn stabilizer_examples() {
        let cfg = SphereConfig::from_columns(3, &[e(3, 0)]).unwrap();
        let m = cfg.stabilizer_element(&DMatrix::identity(2, 2)).unwrap();
        assert!((m - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);

        let q = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let m = cfg.stabilizer_element(&q).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
        assert!((m - want).amax() < 1e-15);

        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(cfg.stabilizer_element(&bad), Err(Error::NotOrthogonal { .. })));

        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            let cfg = SphereConfig::random_full_rank(6, 2, &mut rng).unwrap();
            let m = cfg.random_stabilizer(&mut rng).unwrap();
            assert!((&m * cfg.z() - cfg.z()).amax() < 1e-10);
            assert!(orthogonality_defect(&m) < 1e-10);
        }
    }

    #[test]
    fn sphere_sampler() {
        let pts = sample_sphere(4, 200, 3).unwrap();
        assert!(pts
            .iter()
            .all(|p| (p.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() < 1e-12));
        assert_eq!(pts, sample_sphere(4, 200, 3).unwrap());
        assert_ne!(pts, sample_sphere(4, 200, 4).unwrap());
        assert!(sample_sphere(0, 1, 0).is_err());

        let pts = sample_sphere(3, 100_000, 17).unwrap();
        let mut mean = [0.0; 3];
        for p in &pts {
            for i in 0..3 {
                mean[i] += p[i] / pts.len() as f64;
            }
        }
        assert!(mean.iter().map(|m| m * m).sum::<f64>().sqrt() < 0.02);
    }

    #[test]
    fn orthogonal_sampler() {
        let mut rng = rng_from_seed(9);
        let mut mean = DMatrix::<f64>::zeros(4, 4);
        let count = 10_000;
        for _ in 0..count {
            let m = random_orthogonal(4, &mut rng);
            assert!(orthogonality_defect(&m) < 1e-10);
            assert!((m.determinant().abs() - 1.0).abs() < 1e-10);
            mean += m / count as f64;
        }
        for col in mean.column_iter() {
            assert!(col.norm() < 0.05);
        }
        assert_eq!(sample_orthogonal(5, 1).unwrap(), sample_orthogonal(5, 1).unwrap());
    }

    #[test]
    fn projector_invariants() {
        let mut rng = rng_from_seed(21);
        for _ in 0..1000 {
            let n = rng.random_range(3..9);
            let r = rng.random_range(1..=n - 2);
            let cfg = SphereConfig::random_full_rank(n, r, &mut rng).unwrap();
            let p = cfg.projectors().unwrap();
            let id = DMatrix::<f64>::identity(n, n);
            assert!((&p.pi * &p.pi - &p.pi).amax() < 1e-10);
            assert!((&p.pi_perp * &p.pi_perp - &p.pi_perp).amax() < 1e-10);
            assert!((&p.pi + &p.pi_perp - &id).amax() < 1e-10);
            assert!((&p.pi - p.pi.transpose()).amax() < 1e-10);
            assert!((&p.pi * cfg.z() - cfg.z()).amax() < 1e-10);
            assert!(orthogonality_defect(&p.ort) < 1e-10);
            assert!((&p.pi * &p.ort).amax() < 1e-10);
        }
    }

    #[test]
    fn t1_inverts_t2() {
        let mut rng = rng_from_seed(31);
        for _ in 0..1000 {
            let n = rng.random_range(3..9);
            let r = rng.random_range(1..=n - 2);
            let cfg = SphereConfig::random_full_rank(n, r, &mut rng).unwrap();
            let x = random_unit(n, &mut rng);
            if cfg.perp(&x).unwrap().iter().map(|a| a * a).sum::<f64>().sqrt() <= 1e-6 {
                continue;
            }
            let (v, u) = cfg.map_t2(&x).unwrap();
            let back = cfg.map_t1(&v, &u).unwrap();
            let err = back.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "err {err}");
        }
    }

    #[test]
    fn ort_is_an_isometry_on_the_complement() {
        let mut rng = rng_from_seed(41);
        for _ in 0..200 {
            let cfg = SphereConfig::random_full_rank(7, 3, &mut rng).unwrap();
            let p = cfg.projectors().unwrap();
            let a1 = &p.pi_perp * DVector::from_vec(random_unit(7, &mut rng));
            let a2 = &p.pi_perp * DVector::from_vec(random_unit(7, &mut rng));
            let lhs = (p.ort.transpose() * &a1).dot(&(p.ort.transpose() * &a2));
            assert!((lhs - a1.dot(&a2)).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_configuration() {
        let cfg = SphereConfig::new(DMatrix::zeros(4, 0)).unwrap();
        assert!(cfg.full_rank());
        let x = vec![0.5, 0.5, 0.5, 0.5];
        let y = vec![1.0, 0.0, 0.0, 0.0];
        assert_eq!(cfg.inner_z(&x, &y).unwrap(), 0.5);
        let (v, u) = cfg.map_t2(&x).unwrap();
        assert!(u.is_empty());
        assert_eq!(cfg.map_t1(&v, &u).unwrap(), x);
    }
}
