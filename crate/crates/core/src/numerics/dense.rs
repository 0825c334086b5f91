//! Row-major dense matrices and Gaussian elimination with partial pivoting.
//!
//! Dense storage exists for the discrete-time transition matrices and for
//! validation against the banded solver; it is deliberately minimal.

use crate::error::{Error, Result};
use crate::numerics::tridiag::{TriDiag, PIVOT_TOL};

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_tridiag(t: &TriDiag) -> Self {
        let n = t.n();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, t.diag[i]);
            if i > 0 {
                m.set(i, i - 1, t.lower[i - 1]);
            }
            if i + 1 < n {
                m.set(i, i + 1, t.upper[i]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total buffer size in bytes (used by the benchmark's working-set accounting).
    pub fn bytes(&self) -> usize {
        self.data.len() * std::mem::size_of::<f64>()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `y = A x` (rows are contiguous, so this streams the buffer once).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (yi, row) in y.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            *yi = acc;
        }
    }
}

/// Solve `a x = rhs` by Gaussian elimination with partial pivoting.
///
/// The input is copied; `a` is left untouched.
pub fn dense_solve(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::InvalidInput(format!(
            "dense_solve needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if rhs.len() != a.rows() {
        return Err(Error::InvalidInput(format!(
            "rhs length {} does not match matrix dimension {}",
            rhs.len(),
            a.rows()
        )));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut b = rhs.to_vec();
    for col in 0..n {
        // Partial pivoting: bring the largest remaining entry of this column up.
        let mut pivot_row = col;
        let mut pivot_mag = m.get(col, col).abs();
        for r in col + 1..n {
            let mag = m.get(r, col).abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag < PIVOT_TOL {
            return Err(Error::SingularMatrix {
                row: col,
                pivot: m.get(pivot_row, col),
            });
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = m.get(col, c);
                m.set(col, c, m.get(pivot_row, c));
                m.set(pivot_row, c, tmp);
            }
            b.swap(col, pivot_row);
        }
        let pivot = m.get(col, col);
        for r in col + 1..n {
            let factor = m.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            m.set(r, col, 0.0);
            for c in col + 1..n {
                let v = m.get(r, c) - factor * m.get(col, c);
                m.set(r, c, v);
            }
            b[r] -= factor * b[col];
        }
    }
    // Back substitution.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for c in i + 1..n {
            acc -= m.get(i, c) * x[c];
        }
        x[i] = acc / m.get(i, i);
    }
    Ok(x)
}
