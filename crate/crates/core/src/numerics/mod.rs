//! Shared numerical kernels: banded and dense linear algebra, normal
//! distribution functions, bracketed and simplex minimization, and the
//! log–log slope regression used by the scaling benchmark.

pub mod dense;
pub mod normal;
pub mod optimize;
pub mod slope;
pub mod tridiag;

pub use dense::{dense_solve, DenseMatrix};
pub use normal::{normal_cdf, normal_pdf, std_normal_cdf, std_normal_pdf};
pub use optimize::{minimize_scalar, minimize_simplex, SimplexResult, TracePoint};
pub use slope::loglog_slope;
pub use tridiag::{TriDiag, TriDiagFactorization};
