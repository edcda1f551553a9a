//! Dense tableau simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The slack basis is feasible, so no phase one is needed. Pivoting uses
//! Dantzig's rule and falls back to Bland's rule after a run of degenerate steps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Multipliers of the `≤` rows; optimal for the dual `min bᵀy, Aᵀy ≥ c, y ≥ 0`.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    // rows × (cols + rows + 1); last column is the right-hand side
    t: Vec<f64>,
    reduced: Vec<f64>,
    value: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + self.rows + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width() - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.t[row * w + col];
        for v in &mut self.t[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[row * w..(row + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.t[i * w + col];
            if f != 0.0 {
                for (v, pr) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * w + col] = 0.0;
            }
        }
        let f = self.reduced[col];
        if f != 0.0 {
            for (v, pr) in self.reduced.iter_mut().zip(&pivot_row[..w - 1]) {
                *v -= f * pr;
            }
            self.reduced[col] = 0.0;
            self.value += f * pivot_row[w - 1];
        }
        self.basis[row] = col;
    }

    fn entering(&self, bland: bool, eps: f64) -> Option<usize> {
        let candidates = self.reduced.iter().enumerate().filter(|(_, &r)| r > eps);
        if bland {
            candidates.map(|(j, _)| j).next()
        } else {
            candidates.max_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j)
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a > PIVOT_EPS {
                let ratio = self.rhs(i) / a;
                best = match best {
                    Some((bi, br)) if br < ratio || (br == ratio && self.basis[bi] < self.basis[i]) => Some((bi, br)),
                    _ => Some((i, ratio)),
                };
            }
        }
        best.map(|(i, _)| i)
    }
}

pub fn maximize(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    if b.iter().any(|&v| v.is_nan() || v < 0.0) || a.iter().chain(c).any(|v| !v.is_finite()) {
        return Err(Error::Domain("simplex needs finite data and b >= 0".into()));
    }
    let w = n + m + 1;
    let mut t = vec![0.0; m * w];
    for i in 0..m {
        for j in 0..n {
            t[i * w + j] = a[(i, j)];
        }
        t[i * w + n + i] = 1.0;
        t[i * w + w - 1] = b[i];
    }
    let mut reduced = vec![0.0; n + m];
    reduced[..n].copy_from_slice(c);
    let mut tab = Tableau {
        rows: m,
        cols: n,
        t,
        reduced,
        value: 0.0,
        basis: (n..n + m).collect(),
    };

    let eps = 1e-11 * c.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let limit = 100 * (n + m) + 1000;
    let mut degenerate = 0;
    for iterations in 0..limit {
        let Some(col) = tab.entering(degenerate >= DEGENERATE_RUN, eps) else {
            let mut x = vec![0.0; n];
            for (i, &j) in tab.basis.iter().enumerate() {
                if j < n {
                    x[j] = tab.rhs(i);
                }
            }
            let duals = (0..m).map(|k| (-tab.reduced[n + k]).max(0.0)).collect();
            return Ok(LpSolution {
                x,
                duals,
                objective: tab.value,
                iterations,
            });
        };
        let row = tab.leaving(col).ok_or(Error::Unbounded)?;
        let before = tab.value;
        tab.pivot(row, col);
        if tab.value > before * (1.0 + 1e-15) + 1e-300 {
            degenerate = 0;
        } else {
            degenerate += 1;
        }
    }
    Err(Error::Domain(format!("simplex did not converge in {limit} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 3.0, 2.0]);
        let s = maximize(&a, &[4.0, 12.0, 18.0], &[3.0, 5.0]).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        // dual optimum (0, 3/2, 1)
        let want = [0.0, 1.5, 1.0];
        for (d, w) in s.duals.iter().zip(want) {
            assert!((d - w).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        assert_eq!(maximize(&a, &[1.0], &[0.0, 1.0]), Err(Error::Unbounded));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example
        let a = DMatrix::from_row_slice(
            3,
            4,
            &[0.25, -60.0, -0.04, 9.0, 0.5, -90.0, -0.02, 3.0, 0.0, 0.0, 1.0, 0.0],
        );
        let s = maximize(&a, &[0.0, 0.0, 1.0], &[0.75, -150.0, 0.02, -6.0]).unwrap();
        assert!((s.objective - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_rhs() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        assert!(maximize(&a, &[-1.0], &[1.0]).is_err());
    }
}
