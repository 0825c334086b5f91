//! Tridiagonal matrices stored as three bands, with a factor-once /
//! solve-many Thomas decomposition.

use crate::error::{Error, Result};

/// Pivot magnitudes below this are treated as singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// A tridiagonal matrix stored as three bands.
///
/// `lower[i]` is the entry at (i+1, i), `diag[i]` at (i, i) and `upper[i]`
/// at (i, i+1).
#[derive(Debug, Clone)]
pub struct TriDiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TriDiag {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidInput("tridiagonal matrix of size 0".into()));
        }
        if lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::InvalidInput(format!(
                "band lengths inconsistent: diag {} lower {} upper {}",
                n,
                lower.len(),
                upper.len()
            )));
        }
        Ok(TriDiag { lower, diag, upper })
    }

    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        TriDiag {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// Transpose: swaps the off-diagonal bands.
    pub fn transpose(&self) -> TriDiag {
        TriDiag {
            lower: self.upper.clone(),
            diag: self.diag.clone(),
            upper: self.lower.clone(),
        }
    }

    /// The trailing principal submatrix on indices `start..n`.
    pub fn restrict_from(&self, start: usize) -> TriDiag {
        assert!(start < self.n());
        TriDiag {
            lower: self.lower[start..].to_vec(),
            diag: self.diag[start..].to_vec(),
            upper: self.upper[start..].to_vec(),
        }
    }

    /// LU factorization via the Thomas algorithm (no pivoting).
    ///
    /// The generators assembled in this crate are diagonally dominant by
    /// construction, so pivoting is unnecessary; a pivot-magnitude check
    /// guards against misuse.
    pub fn factor(&self) -> Result<TriDiagFactorization> {
        let n = self.n();
        let mut piv = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        piv[0] = self.diag[0];
        if piv[0].abs() < PIVOT_TOL {
            return Err(Error::SingularMatrix {
                row: 0,
                pivot: piv[0],
            });
        }
        for i in 1..n {
            let l = self.lower[i - 1] / piv[i - 1];
            mult[i - 1] = l;
            piv[i] = self.diag[i] - l * self.upper[i - 1];
            if piv[i].abs() < PIVOT_TOL {
                return Err(Error::SingularMatrix {
                    row: i,
                    pivot: piv[i],
                });
            }
        }
        Ok(TriDiagFactorization {
            mult,
            piv,
            upper: self.upper.clone(),
        })
    }
}

/// Reusable Thomas factorization: factor once, solve many right-hand sides
/// in O(N) each.
#[derive(Debug, Clone)]
pub struct TriDiagFactorization {
    /// Forward-elimination multipliers (unit lower bidiagonal L).
    mult: Vec<f64>,
    /// Pivots (diagonal of U).
    piv: Vec<f64>,
    /// Superdiagonal of U (unchanged by the elimination).
    upper: Vec<f64>,
}

impl TriDiagFactorization {
    pub fn n(&self) -> usize {
        self.piv.len()
    }

    /// Solve `A x = rhs`, writing the solution into `out`.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) {
        let n = self.n();
        assert_eq!(rhs.len(), n);
        assert_eq!(out.len(), n);
        out[0] = rhs[0];
        for i in 1..n {
            out[i] = rhs[i] - self.mult[i - 1] * out[i - 1];
        }
        out[n - 1] /= self.piv[n - 1];
        for i in (0..n - 1).rev() {
            out[i] = (out[i] - self.upper[i] * out[i + 1]) / self.piv[i];
        }
    }

    /// Solve `A x = rhs` into a fresh vector.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; rhs.len()];
        self.solve_into(rhs, &mut out);
        out
    }
}
