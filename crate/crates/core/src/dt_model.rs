//! Discrete-time solver: value function iteration on the married/single
//! Bellman system, threshold extraction with an interpolation weight, the
//! (N+1)-state transition matrix, and the stationary distribution via a
//! dense closed-form solve or fixed-point iteration.

use crate::error::{Error, Result};
use crate::household::indirect_utility;
use crate::match_process::{build_grid, discretize_singles, tauchen, Demographics, Grid};
use crate::numerics::{dense_solve, DenseMatrix};
use crate::params::ModelParams;

/// Default sup-norm tolerance of the value iteration.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default iteration budget of the value iteration.
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Fixed-point tolerance of the iterative stationary solve.
const STATIONARY_TOL: f64 = 1e-12;
const STATIONARY_MAX_ITER: usize = 500_000;
/// Grid half-width (in standard deviations) used for both the married
/// process and the singles draw support.
const GRID_N_STD: f64 = 4.0;

/// How to compute the stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryMode {
    /// Dense linear solve of the stationarity condition (validation path).
    ClosedForm,
    /// Fixed-point iteration on the full transition matrix; this is the
    /// O(N^2)-per-sweep path the scaling benchmark measures.
    Iterate,
}

/// Converged discrete-time equilibrium at one set of prices.
#[derive(Debug, Clone)]
pub struct DtSolution {
    /// Married value function on the grid.
    pub v: Vec<f64>,
    /// Singles' value.
    pub w_single: f64,
    /// First grid index whose value reaches `w_single` (0-based).
    pub iota: usize,
    /// Sub-cell position of the indifference point, in [0,1].
    pub omega: f64,
    /// Implied threshold match quality.
    pub b_star: f64,
    /// Stationary mass of singles.
    pub s: f64,
    /// Stationary masses of married households per grid state.
    pub m: Vec<f64>,
    /// Per-period marriage probability of a single (conditional on survival).
    pub prob_marriage: f64,
    /// Per-period divorce probability of a married couple (conditional on
    /// survival).
    pub prob_divorce: f64,
    /// Utility gap `v(p,w,2) - v(p,w,1)`.
    pub utility_gap: f64,
    /// Value-iteration sweeps used.
    pub iterations: usize,
    /// Working-set bytes of the solver's large buffers (dense matrices plus
    /// the handful of state vectors); reported by the scaling benchmark.
    pub peak_bytes: usize,
}

/// The grid used by the discrete-time solver: spans both the married
/// process and the singles draw so the draw vector is representable on-grid.
pub fn dt_grid(params: &ModelParams, n: usize) -> Result<Grid> {
    let (mu_m, sig_m) = (params.ar1.mu_m, params.ar1.sigma());
    let (mu_s, sig_s) = (params.singles.mu_s, params.singles.sigma());
    // Anchor the grid on whichever process reaches higher, then extend the
    // lower edge to cover the other one.
    if mu_s + GRID_N_STD * sig_s >= mu_m + GRID_N_STD * sig_m {
        build_grid(mu_s, sig_s, GRID_N_STD, mu_m - GRID_N_STD * sig_m, n)
    } else {
        build_grid(mu_m, sig_m, GRID_N_STD, mu_s - GRID_N_STD * sig_s, n)
    }
}

/// Value function iteration on the Bellman system.
///
/// `g` is the married transition matrix, `f_vec` the singles draw vector,
/// and `(v1, v2)` the per-period indirect utilities of singles and couples.
/// `v` and `w` are updated simultaneously each sweep from the previous
/// sweep's values; iteration stops once the sup-norm change falls below
/// `tol`, which bounds the Bellman residual by `beta * tol`.
pub fn solve_vfi(
    demo: &Demographics,
    grid: &Grid,
    g: &DenseMatrix,
    f_vec: &[f64],
    v1: f64,
    v2: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    let n = grid.n();
    let beta = demo.beta;
    let pts = grid.points();
    let mut v: Vec<f64> = pts.iter().map(|b| (v2 + b) / (1.0 - beta)).collect();
    let mut w = v1 / (1.0 - beta);
    let mut vmax = vec![0.0; n];
    let mut ev = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        for i in 0..n {
            vmax[i] = v[i].max(w);
        }
        g.matvec(&vmax, &mut ev);
        let mut w_new = 0.0;
        for i in 0..n {
            w_new += f_vec[i] * vmax[i];
        }
        w_new = v1 + beta * w_new;
        let mut diff = (w_new - w).abs();
        for i in 0..n {
            let v_new = v2 + pts[i] + beta * ev[i];
            diff = diff.max((v_new - v[i]).abs());
            v[i] = v_new;
        }
        w = w_new;
        residual = diff;
        if diff < tol {
            return Ok((v, w, it));
        }
    }
    Err(Error::MaxIterationsExceeded {
        what: "discrete-time value iteration",
        max_iter,
        residual,
    })
}

/// Locate the marriage/divorce threshold on a nondecreasing value vector.
///
/// Returns the first index `iota` with `v[iota] >= w` and the interpolation
/// weight `omega = (w - v[iota-1]) / (v[iota] - v[iota-1])`, clamped to
/// [0,1]. `w` below the whole vector gives `(0, 0.0)`; `w` above it is an
/// error (no grid point accepts).
pub fn dt_threshold(v: &[f64], w: f64) -> Result<(usize, f64)> {
    let n = v.len();
    for i in 1..n {
        let drop = v[i - 1] - v[i];
        if drop > 1e-9 {
            return Err(Error::NonMonotoneValue { index: i, drop });
        }
    }
    if w <= v[0] {
        return Ok((0, 0.0));
    }
    if w > v[n - 1] {
        return Err(Error::AllReject);
    }
    // First index with v[i] >= w; the scan starts at 1 because v[0] < w here.
    let mut iota = n - 1;
    for i in 1..n {
        if v[i] >= w {
            iota = i;
            break;
        }
    }
    let denom = v[iota] - v[iota - 1];
    let omega = if denom > 0.0 {
        ((w - v[iota - 1]) / denom).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok((iota, omega))
}

/// Assemble the (N+1)x(N+1) column-stochastic transition matrix over the
/// married grid states plus the singles state (index N).
///
/// Column `j < N` is a married couple at state `j`: next-period draws land
/// in continuation states above the threshold, the threshold bin `iota`
/// splits by `omega`, and the rejected mass flows to the singles state.
/// Column `N` is a single household drawing from `f_vec` with the same
/// split.
pub fn build_transition(
    g: &DenseMatrix,
    f_vec: &[f64],
    iota: usize,
    omega: f64,
) -> DenseMatrix {
    let n = g.rows();
    let mut p = DenseMatrix::zeros(n + 1, n + 1);
    for j in 0..n {
        let row = g.row(j);
        let reject: f64 = row[..iota].iter().sum();
        p.set(iota, j, row[iota] * (1.0 - omega));
        for k in iota + 1..n {
            p.set(k, j, row[k]);
        }
        p.set(n, j, reject + row[iota] * omega);
    }
    let reject: f64 = f_vec[..iota].iter().sum();
    p.set(iota, n, f_vec[iota] * (1.0 - omega));
    for k in iota + 1..n {
        p.set(k, n, f_vec[k]);
    }
    p.set(n, n, reject + f_vec[iota] * omega);
    p
}

/// Stationary distribution of the population chain with exit rate `delta`
/// and newborns entering single: masses `m` on the married states and the
/// singles mass `s`, normalized to total one.
pub fn dt_stationary(
    p_mat: &DenseMatrix,
    delta: f64,
    mode: StationaryMode,
) -> Result<(Vec<f64>, f64)> {
    let dim = p_mat.rows();
    let n = dim - 1;
    let x = match mode {
        StationaryMode::ClosedForm => {
            // Solve (I - (1-delta) P) x = delta * e_single.
            let mut a = DenseMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    let v = f64::from(u8::from(r == c)) - (1.0 - delta) * p_mat.get(r, c);
                    a.set(r, c, v);
                }
            }
            let mut rhs = vec![0.0; dim];
            rhs[n] = delta;
            dense_solve(&a, &rhs)?
        }
        StationaryMode::Iterate => {
            let mut x = vec![0.0; dim];
            x[n] = 1.0;
            let mut next = vec![0.0; dim];
            let mut converged = false;
            let mut residual = f64::INFINITY;
            for _ in 0..STATIONARY_MAX_ITER {
                p_mat.matvec(&x, &mut next);
                let mut diff = 0.0f64;
                for i in 0..dim {
                    let v = (1.0 - delta) * next[i] + if i == n { delta } else { 0.0 };
                    diff = diff.max((v - x[i]).abs());
                    x[i] = v;
                }
                residual = diff;
                if diff < STATIONARY_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::MaxIterationsExceeded {
                    what: "stationary fixed-point iteration",
                    max_iter: STATIONARY_MAX_ITER,
                    residual,
                });
            }
            x
        }
    };
    let total: f64 = x.iter().sum();
    let m: Vec<f64> = x[..n].iter().map(|v| v / total).collect();
    let s = x[n] / total;
    Ok((m, s))
}

/// Per-period marriage and divorce probabilities, both conditional on
/// survival.
///
/// Marriage: the acceptance mass of the singles draw above the split
/// threshold. Divorce: the cross-sectional average over married couples of
/// the mass of next-period draws falling below it.
pub fn dt_rates(
    g: &DenseMatrix,
    f_vec: &[f64],
    iota: usize,
    omega: f64,
    m: &[f64],
    s: f64,
) -> Result<(f64, f64)> {
    let married_mass = 1.0 - s;
    if married_mass < 1e-12 {
        return Err(Error::DegenerateMass { mass: married_mass });
    }
    let n = f_vec.len();
    let tail: f64 = f_vec[iota + 1..n].iter().sum();
    let pm = (1.0 - omega) * f_vec[iota] + tail;
    let mut pd = 0.0;
    for j in 0..n {
        let row = g.row(j);
        let below: f64 = row[..iota].iter().sum::<f64>() + omega * row[iota];
        pd += m[j] / married_mass * below;
    }
    Ok((pm, pd))
}

/// Solve the full discrete-time stationary equilibrium at `params`' prices
/// on an `n`-point grid.
pub fn solve(
    params: &ModelParams,
    n: usize,
    tol: f64,
    max_iter: usize,
    mode: StationaryMode,
) -> Result<DtSolution> {
    let grid = dt_grid(params, n)?;
    let v1 = indirect_utility(&params.prefs, &params.tech, params.p, params.w, 1)?;
    let v2 = indirect_utility(&params.prefs, &params.tech, params.p, params.w, 2)?;
    let g = tauchen(&params.ar1, &grid);
    let f_vec = discretize_singles(&params.singles, &grid)?;
    let (v, w_single, iterations) =
        solve_vfi(&params.demo, &grid, &g, &f_vec, v1, v2, tol, max_iter)?;
    let (iota, omega) = dt_threshold(&v, w_single)?;
    let p_mat = build_transition(&g, &f_vec, iota, omega);
    let peak_bytes = g.bytes()
        + p_mat.bytes()
        + 8 * (6 * (n + 1)); // value/work vectors
    let (m, s) = dt_stationary(&p_mat, params.demo.delta, mode)?;
    let (prob_marriage, prob_divorce) = dt_rates(&g, &f_vec, iota, omega, &m, s)?;
    let b_star = if iota == 0 {
        grid.points()[0]
    } else {
        grid.points()[iota - 1] + omega * grid.db()
    };
    Ok(DtSolution {
        v,
        w_single,
        iota,
        omega,
        b_star,
        s,
        m,
        prob_marriage,
        prob_divorce,
        utility_gap: v2 - v1,
        iterations,
        peak_bytes,
    })
}
