//! Continuous-time solver.
//!
//! The married value function satisfies an obstacle problem: a linear
//! differential equation in match quality wherever staying married beats the
//! singles' value, and the constraint `V >= W` (divorce is available
//! instantly) everywhere. It is solved with an implicit pseudo-time scheme
//! whose update is projected onto the constraint set, nested inside an outer
//! loop that recomputes the singles' value from the acceptance integral.
//! The stationary cross-sectional density then comes from the forward
//! equation with an absorbing boundary at the divorce threshold, solved at
//! the two grid points bracketing the threshold and blended linearly.

use crate::error::{Error, Result};
use crate::household::indirect_utility;
use crate::match_process::{build_grid, ou_generator, Demographics, Grid, OuProcess, SinglesDraw};
use crate::numerics::tridiag::{TriDiag, TriDiagFactorization};
use crate::params::ModelParams;

/// Default pseudo-time step of the implicit scheme. The scheme is
/// unconditionally stable; a large step approaches a direct solve while
/// keeping the constraint projection well-behaved.
pub const DEFAULT_PSEUDO_STEP: f64 = 100.0;
/// Default tolerance shared by the inner (value) and outer (singles' value)
/// loops.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default half-width of the match-quality grid in standard deviations.
pub const DEFAULT_N_STD: f64 = 5.0;
/// Default outer-loop damping: weight placed on the updated singles' value.
pub const DEFAULT_DAMPING: f64 = 0.5;
const MAX_INNER: usize = 100_000;
const MAX_OUTER: usize = 10_000;

/// The implicit-scheme matrix `B = (1/step + rho) I - A`, factored once per
/// (parameters, grid) pair and reused by every inner iteration.
#[derive(Debug, Clone)]
pub struct ImplicitMatrix {
    pub b_mat: TriDiag,
    pub factorization: TriDiagFactorization,
    pub pseudo_step: f64,
}

impl ImplicitMatrix {
    pub fn build(a: &TriDiag, rho: f64, pseudo_step: f64) -> Result<Self> {
        if !(pseudo_step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "pseudo_step",
                value: pseudo_step,
                requirement: "must be > 0",
            });
        }
        let n = a.n();
        let shift = 1.0 / pseudo_step + rho;
        let mut b = TriDiag::zeros(n);
        for i in 0..n {
            b.diag[i] = shift - a.diag[i];
        }
        for i in 0..n - 1 {
            b.lower[i] = -a.lower[i];
            b.upper[i] = -a.upper[i];
        }
        let factorization = b.factor()?;
        Ok(ImplicitMatrix {
            b_mat: b,
            factorization,
            pseudo_step,
        })
    }
}

/// Output of the value-function stage.
#[derive(Debug, Clone)]
pub struct HjbSolution {
    /// Married value on the grid (projected: `v >= w_single`).
    pub v: Vec<f64>,
    /// Final unclamped implicit update, used for threshold extraction.
    pub v_unclamped: Vec<f64>,
    /// Singles' value.
    pub w_single: f64,
    /// Threshold match quality.
    pub b_star: f64,
    /// First grid index in the continuation region (0-based).
    pub iota: usize,
    /// Sub-cell position of the threshold, in [0,1].
    pub omega: f64,
    pub inner_iterations: usize,
    pub outer_iterations: usize,
}

/// Threshold location on the unclamped update: `Interior` carries
/// `(iota, omega)`; the other two arise transiently while the singles'
/// value is still far from its fixed point.
enum ThresholdState {
    AllAccept,
    Interior(usize, f64),
    AllReject,
}

fn locate_threshold(v_unclamped: &[f64], w: f64) -> Result<ThresholdState> {
    let n = v_unclamped.len();
    for i in 1..n {
        let drop = v_unclamped[i - 1] - v_unclamped[i];
        if drop > 1e-9 {
            return Err(Error::NonMonotoneUnclamped { index: i, drop });
        }
    }
    if v_unclamped[0] >= w {
        return Ok(ThresholdState::AllAccept);
    }
    if v_unclamped[n - 1] < w {
        return Ok(ThresholdState::AllReject);
    }
    let mut iota = n - 1;
    for i in 1..n {
        if v_unclamped[i] >= w {
            iota = i;
            break;
        }
    }
    let denom = v_unclamped[iota] - v_unclamped[iota - 1];
    let omega = if denom > 0.0 {
        ((w - v_unclamped[iota - 1]) / denom).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ThresholdState::Interior(iota, omega))
}

/// Solve the obstacle problem for the married value `V` and the singles'
/// value `W`.
///
/// Inner loop (fixed `W`): implicit update `Vt = B^{-1}(u_m + V/step)`
/// projected onto `V = max(Vt, W)` until the sup-norm change passes `tol`.
/// Outer loop: the threshold is read off the *unclamped* update to avoid
/// grid snapping, the acceptance integral uses linear interpolation in the
/// boundary cell, and the singles' value update
/// `W_new = (v1 + lambda * integral) / (rho + lambda * (1 - F(b*)))`
/// is relaxed with weight `damping` on the new value.
///
/// While `W` is far from its fixed point the threshold can transiently leave
/// the grid (everyone accepts or rejects); that only becomes an error if it
/// persists at convergence.
#[allow(clippy::too_many_arguments)]
pub fn solve_hjb(
    demo: &Demographics,
    grid: &Grid,
    a: &TriDiag,
    u_m: &[f64],
    v1: f64,
    f: &SinglesDraw,
    pseudo_step: f64,
    tol: f64,
    damping: f64,
) -> Result<HjbSolution> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "damping",
            value: damping,
            requirement: "must lie in (0, 1]",
        });
    }
    let n = grid.n();
    let rho = demo.rho;
    let lambda = demo.lambda;
    let db = grid.db();
    let pts = grid.points();
    let implicit = ImplicitMatrix::build(a, rho, pseudo_step)?;

    let f_pdf: Vec<f64> = pts.iter().map(|b| f.pdf(*b)).collect();
    let mut v: Vec<f64> = u_m.iter().map(|u| u / rho).collect();
    let mut w = v1 / rho;
    let mut v_unclamped = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut inner_total = 0usize;
    let mut outer_total = 0usize;
    let mut last_outer_residual = f64::INFINITY;

    for _outer in 0..MAX_OUTER {
        outer_total += 1;
        // Inner loop: value update under the current singles' value.
        let mut converged_inner = false;
        let mut last_inner_residual = f64::INFINITY;
        for _inner in 0..MAX_INNER {
            inner_total += 1;
            for i in 0..n {
                rhs[i] = u_m[i] + v[i] / pseudo_step;
            }
            implicit.factorization.solve_into(&rhs, &mut v_unclamped);
            let mut diff = 0.0f64;
            for i in 0..n {
                let vn = v_unclamped[i].max(w);
                diff = diff.max((vn - v[i]).abs());
                v[i] = vn;
            }
            last_inner_residual = diff;
            if diff < tol {
                converged_inner = true;
                break;
            }
        }
        if !converged_inner {
            return Err(Error::MaxIterationsExceeded {
                what: "implicit value iteration (inner loop)",
                max_iter: MAX_INNER,
                residual: last_inner_residual,
            });
        }

        // Threshold from the unclamped update; acceptance integral with the
        // boundary cell linearly interpolated.
        let state = locate_threshold(&v_unclamped, w)?;
        let (b_star, integral) = match &state {
            ThresholdState::AllAccept => {
                let total: f64 = v.iter().zip(&f_pdf).map(|(vi, fi)| vi * fi).sum();
                (pts[0], total * db)
            }
            ThresholdState::AllReject => (pts[n - 1], 0.0),
            ThresholdState::Interior(iota, omega) => {
                let iota = *iota;
                let omega = *omega;
                let mut acc = (1.0 - omega) * v[iota - 1] * f_pdf[iota - 1];
                for i in iota..n {
                    acc += v[i] * f_pdf[i];
                }
                (pts[iota - 1] + omega * db, acc * db)
            }
        };
        let accept_prob = 1.0 - f.cdf(b_star);
        let w_new = (v1 + lambda * integral) / (rho + lambda * accept_prob);
        last_outer_residual = (w_new - w).abs();
        if last_outer_residual < tol {
            w = w_new;
            return match state {
                ThresholdState::AllAccept => Err(Error::AllAccept),
                ThresholdState::AllReject => Err(Error::AllReject),
                ThresholdState::Interior(iota, omega) => Ok(HjbSolution {
                    v,
                    v_unclamped,
                    w_single: w,
                    b_star,
                    iota,
                    omega,
                    inner_iterations: inner_total,
                    outer_iterations: outer_total,
                }),
            };
        }
        w = damping * w_new + (1.0 - damping) * w;
    }
    Err(Error::MaxIterationsExceeded {
        what: "singles-value update (outer loop)",
        max_iter: MAX_OUTER,
        residual: last_outer_residual,
    })
}

/// Output of the stationary-distribution stage.
#[derive(Debug, Clone)]
pub struct KfeSolution {
    /// Married density on the full grid (zero below the threshold cell).
    pub m: Vec<f64>,
    /// Singles mass.
    pub s: f64,
    /// Singles mass when the absorbing boundary sits at grid point
    /// `iota - 1` (larger continuation region).
    pub s_lo: f64,
    /// Singles mass when it sits at `iota` (smaller continuation region).
    pub s_hi: f64,
    /// First-cell density of the lower component solve (at index `iota-1`).
    pub boundary_density_lo: f64,
    /// First-cell density of the upper component solve (at index `iota`).
    pub boundary_density_hi: f64,
}

/// Stationary cross-sectional distribution given the converged threshold.
///
/// For each of the two clean boundaries `j` bracketing `b*`, restrict the
/// generator to the continuation grid (dropping the link below `j` makes the
/// boundary absorbing), solve the linear system
/// `(A_j^T - nu I) z = f_j` in one tridiagonal pass, convert to the singles
/// mass via `s_j = 1 / (1 - lambda * db * sum(z))`, and blend the two
/// solutions linearly with the threshold weight `omega`.
pub fn solve_kfe(
    a: &TriDiag,
    grid: &Grid,
    f: &SinglesDraw,
    nu: f64,
    lambda: f64,
    iota: usize,
    omega: f64,
) -> Result<KfeSolution> {
    let n = grid.n();
    if iota == 0 || iota >= n {
        return Err(Error::InvalidInput(format!(
            "threshold index {iota} must be interior for the stationary solve"
        )));
    }
    let db = grid.db();
    let component = |j: usize| -> Result<(f64, Vec<f64>)> {
        let size = n - j;
        let sub = a.restrict_from(j).transpose();
        let mut t = sub;
        for i in 0..size {
            t.diag[i] -= nu;
        }
        let fac = t.factor()?;
        let f_j: Vec<f64> = grid.points()[j..].iter().map(|b| f.pdf(*b)).collect();
        let z = fac.solve(&f_j);
        let zsum: f64 = z.iter().sum();
        let s_j = 1.0 / (1.0 - lambda * db * zsum);
        let m_j: Vec<f64> = z.iter().map(|zi| -lambda * s_j * zi).collect();
        Ok((s_j, m_j))
    };
    let (s_lo, m_lo) = component(iota - 1)?;
    let (s_hi, m_hi) = component(iota)?;
    let s = (1.0 - omega) * s_lo + omega * s_hi;
    let mut m = vec![0.0; n];
    for (k, v) in m_lo.iter().enumerate() {
        m[iota - 1 + k] += (1.0 - omega) * v;
    }
    for (k, v) in m_hi.iter().enumerate() {
        m[iota + k] += omega * v;
    }
    for (i, v) in m.iter_mut().enumerate() {
        if *v < -1e-8 {
            return Err(Error::NegativeDensity {
                index: i,
                value: *v,
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(KfeSolution {
        m,
        s,
        s_lo,
        s_hi,
        boundary_density_lo: m_lo[0],
        boundary_density_hi: m_hi[0],
    })
}

/// Marriage and divorce hazards plus their per-period probabilities.
///
/// The marriage hazard is the meeting rate times the acceptance
/// probability. The divorce hazard is backed out of stationary mass
/// balance — marriage inflow equals divorce outflow plus demographic churn —
/// which is exact in the discretized system, and floored at zero. Hazards
/// convert to per-period probabilities via `1 - exp(-hazard * dt)`.
pub fn ct_rates(
    f: &SinglesDraw,
    lambda: f64,
    nu: f64,
    b_star: f64,
    s: f64,
    dt: f64,
) -> Result<CtRates> {
    let married = 1.0 - s;
    if married < 1e-12 {
        return Err(Error::DegenerateMass { mass: married });
    }
    let accept = 1.0 - f.cdf(b_star);
    let hazard_marriage = lambda * accept;
    let hazard_divorce = ((lambda * s * accept - nu * married) / married).max(0.0);
    Ok(CtRates {
        hazard_marriage,
        hazard_divorce,
        prob_marriage: 1.0 - (-hazard_marriage * dt).exp(),
        prob_divorce: 1.0 - (-hazard_divorce * dt).exp(),
    })
}

/// Flow rates in hazard and per-period-probability form.
#[derive(Debug, Clone, Copy)]
pub struct CtRates {
    pub hazard_marriage: f64,
    pub hazard_divorce: f64,
    pub prob_marriage: f64,
    pub prob_divorce: f64,
}

/// Converged continuous-time equilibrium at one set of prices.
#[derive(Debug, Clone)]
pub struct CtSolution {
    pub v: Vec<f64>,
    /// Last pre-projection update; the operator identities of the scheme
    /// hold in terms of this vector (see [`HjbSolution::v_unclamped`]).
    pub v_unclamped: Vec<f64>,
    pub w_single: f64,
    pub b_star: f64,
    pub iota: usize,
    pub omega: f64,
    pub s: f64,
    /// Married density on the grid (integrates against `db` to `1 - s`).
    pub m: Vec<f64>,
    pub s_lo: f64,
    pub s_hi: f64,
    pub boundary_density_lo: f64,
    pub boundary_density_hi: f64,
    pub hazard_marriage: f64,
    pub hazard_divorce: f64,
    /// Per-period marriage probability, `1 - exp(-hazard * dt)`.
    pub prob_marriage: f64,
    /// Per-period divorce probability, `1 - exp(-hazard * dt)`.
    pub prob_divorce: f64,
    pub utility_gap: f64,
    pub inner_iterations: usize,
    pub outer_iterations: usize,
    /// Working-set bytes of the banded matrices and state vectors; reported
    /// by the scaling benchmark.
    pub peak_bytes: usize,
}

/// The grid used by the continuous-time solver: centered on the diffusion's
/// stationary mean. Acceptance probabilities use the analytic draw CDF, so
/// the grid does not need to cover the singles draw's lower tail.
pub fn ct_grid(ou: &OuProcess, n: usize, n_std: f64) -> Result<Grid> {
    build_grid(ou.mu_m, ou.sigma(), n_std, f64::INFINITY, n)
}

/// Solve the full continuous-time stationary equilibrium at `params`'
/// prices on an `n`-point grid.
pub fn solve(
    params: &ModelParams,
    n: usize,
    n_std: f64,
    pseudo_step: f64,
    tol: f64,
    damping: f64,
) -> Result<CtSolution> {
    let grid = ct_grid(&params.ou, n, n_std)?;
    let v1 = indirect_utility(&params.prefs, &params.tech, params.p, params.w, 1)?;
    let v2 = indirect_utility(&params.prefs, &params.tech, params.p, params.w, 2)?;
    let a = ou_generator(&params.ou, &grid);
    let u_m: Vec<f64> = grid.points().iter().map(|b| v2 + b).collect();
    let hjb = solve_hjb(
        &params.demo,
        &grid,
        &a,
        &u_m,
        v1,
        &params.singles,
        pseudo_step,
        tol,
        damping,
    )?;
    let kfe = solve_kfe(
        &a,
        &grid,
        &params.singles,
        params.demo.nu,
        params.demo.lambda,
        hjb.iota,
        hjb.omega,
    )?;
    let rates = ct_rates(
        &params.singles,
        params.demo.lambda,
        params.demo.nu,
        hjb.b_star,
        kfe.s,
        params.demo.dt,
    )?;
    // Three bands each for the generator, implicit matrix and its
    // factorization, plus the value/density/work vectors.
    let peak_bytes = 8 * (9 * n + 8 * n);
    Ok(CtSolution {
        v: hjb.v,
        v_unclamped: hjb.v_unclamped,
        w_single: hjb.w_single,
        b_star: hjb.b_star,
        iota: hjb.iota,
        omega: hjb.omega,
        s: kfe.s,
        m: kfe.m,
        s_lo: kfe.s_lo,
        s_hi: kfe.s_hi,
        boundary_density_lo: kfe.boundary_density_lo,
        boundary_density_hi: kfe.boundary_density_hi,
        hazard_marriage: rates.hazard_marriage,
        hazard_divorce: rates.hazard_divorce,
        prob_marriage: rates.prob_marriage,
        prob_divorce: rates.prob_divorce,
        utility_gap: v2 - v1,
        inner_iterations: hjb.inner_iterations,
        outer_iterations: hjb.outer_iterations,
        peak_bytes,
    })
}
