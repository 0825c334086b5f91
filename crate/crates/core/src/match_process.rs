//! Match-quality stochastic processes and their discretizations: the
//! singles' draw distribution, the AR(1) law of motion with its Tauchen
//! transition matrix, the mean-reverting diffusion with its upwind
//! generator, and the discrete-to-continuous rate mappings.

use crate::error::{Error, Result};
use crate::numerics::{std_normal_cdf, std_normal_pdf, DenseMatrix, TriDiag};

/// Normal draw distribution faced by singles when they meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglesDraw {
    pub mu_s: f64,
    pub sigma_s2: f64,
}

impl SinglesDraw {
    pub fn new(mu_s: f64, sigma_s2: f64) -> Result<Self> {
        if !(sigma_s2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_s2",
                value: sigma_s2,
                requirement: "must be > 0",
            });
        }
        Ok(SinglesDraw { mu_s, sigma_s2 })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_s2.sqrt()
    }

    /// Analytic CDF of the draw distribution.
    pub fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mu_s) / self.sigma())
    }

    /// Analytic density of the draw distribution.
    pub fn pdf(&self, x: f64) -> f64 {
        std_normal_pdf((x - self.mu_s) / self.sigma()) / self.sigma()
    }
}

/// Discrete-time AR(1) for married match quality,
/// `b' = (1-rho_ar)*mu_m + rho_ar*b + sigma_m*sqrt(1-rho_ar^2)*xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Process {
    pub mu_m: f64,
    pub sigma_m2: f64,
    /// Persistence, in (-1, 1).
    pub rho_ar: f64,
}

impl Ar1Process {
    pub fn new(mu_m: f64, sigma_m2: f64, rho_ar: f64) -> Result<Self> {
        if !(sigma_m2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_m2",
                value: sigma_m2,
                requirement: "must be > 0",
            });
        }
        if !(rho_ar.abs() < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho_ar",
                value: rho_ar,
                requirement: "must lie in (-1,1)",
            });
        }
        Ok(Ar1Process {
            mu_m,
            sigma_m2,
            rho_ar,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_m2.sqrt()
    }

    /// Conditional mean of `b'` given `b`.
    pub fn cond_mean(&self, b: f64) -> f64 {
        (1.0 - self.rho_ar) * self.mu_m + self.rho_ar * b
    }

    /// Conditional standard deviation of `b'` (stationary-variance scaling).
    pub fn cond_sd(&self) -> f64 {
        (self.sigma_m2 * (1.0 - self.rho_ar * self.rho_ar)).sqrt()
    }
}

/// Continuous-time mean-reverting diffusion for married match quality,
/// `db = eta*(mu_m - b) dt + sigma_m*sqrt(2*eta) dB`, whose stationary law
/// is N(mu_m, sigma_m2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuProcess {
    pub mu_m: f64,
    pub sigma_m2: f64,
    /// Mean-reversion speed, > 0.
    pub eta: f64,
}

impl OuProcess {
    pub fn new(mu_m: f64, sigma_m2: f64, eta: f64) -> Result<Self> {
        if !(sigma_m2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma_m2",
                value: sigma_m2,
                requirement: "must be > 0",
            });
        }
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                requirement: "must be > 0",
            });
        }
        Ok(OuProcess {
            mu_m,
            sigma_m2,
            eta,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_m2.sqrt()
    }
}

/// Uniform match-quality grid.
#[derive(Debug, Clone)]
pub struct Grid {
    points: Vec<f64>,
    db: f64,
}

impl Grid {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn db(&self) -> f64 {
        self.db
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Build a uniform grid spanning `[min(center - n_std*sigma, lo_extend),
/// center + n_std*sigma]` with `n` points.
///
/// Pass `lo_extend = f64::INFINITY` to keep the symmetric span; a finite
/// value widens the lower end (used by the discrete-time solver so the
/// singles draw is representable on-grid).
pub fn build_grid(center: f64, sigma: f64, n_std: f64, lo_extend: f64, n: usize) -> Result<Grid> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
            requirement: "must be > 0",
        });
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("grid needs n >= 3, got {n}")));
    }
    let lo = (center - n_std * sigma).min(lo_extend);
    let hi = center + n_std * sigma;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "degenerate grid interval [{lo}, {hi}]"
        )));
    }
    let db = (hi - lo) / (n - 1) as f64;
    let points = (0..n).map(|i| lo + i as f64 * db).collect();
    Ok(Grid { points, db })
}

/// Tauchen transition matrix for the AR(1) on `grid`: row `j` holds the
/// conditional bin probabilities given `b = grid[j]`.
///
/// Bins split at cell midpoints; the end bins absorb the tails, and the last
/// bin takes the remainder so every row sums to one exactly.
pub fn tauchen(ar1: &Ar1Process, grid: &Grid) -> DenseMatrix {
    let n = grid.n();
    let pts = grid.points();
    let half = 0.5 * grid.db();
    let sd = ar1.cond_sd();
    let mut g = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mean = ar1.cond_mean(pts[j]);
        let row = g.row_mut(j);
        let mut below = std_normal_cdf((pts[0] + half - mean) / sd);
        row[0] = below;
        let mut acc = below;
        for (i, item) in row.iter_mut().enumerate().take(n - 1).skip(1) {
            let up = std_normal_cdf((pts[i] + half - mean) / sd);
            *item = up - below;
            acc += up - below;
            below = up;
        }
        row[n - 1] = (1.0 - acc).max(0.0);
    }
    g
}

/// Probability vector of the singles draw on `grid`, with the same
/// midpoint-bin convention and the tails folded into the end bins.
///
/// Fails when the mass folded in from beyond the natural end cells exceeds
/// one percent: that signals a grid too narrow for the draw distribution.
pub fn discretize_singles(f: &SinglesDraw, grid: &Grid) -> Result<Vec<f64>> {
    let n = grid.n();
    let pts = grid.points();
    let half = 0.5 * grid.db();
    let sd = f.sigma();
    let z = |x: f64| (x - f.mu_s) / sd;
    let folded = std_normal_cdf(z(pts[0] - half)) + (1.0 - std_normal_cdf(z(pts[n - 1] + half)));
    if folded > 0.01 {
        return Err(Error::TailMass { mass: folded });
    }
    let mut out = vec![0.0; n];
    let mut below = std_normal_cdf(z(pts[0] + half));
    out[0] = below;
    let mut acc = below;
    for i in 1..n - 1 {
        let up = std_normal_cdf(z(pts[i] + half));
        out[i] = up - below;
        acc += up - below;
        below = up;
    }
    out[n - 1] = (1.0 - acc).max(0.0);
    Ok(out)
}

/// Upwind finite-difference generator of the mean-reverting diffusion on
/// `grid`, stored as three bands.
///
/// Interior rows use the drift split `d = eta*(mu_m - b)`, `d+ = max(d,0)`,
/// `d- = min(d,0)`:
///
/// ```text
/// A[i,i+1] = d+ / db + eta*sigma_m2 / db^2
/// A[i,i-1] = -d- / db + eta*sigma_m2 / db^2
/// A[i,i]   = -(A[i,i-1] + A[i,i+1])
/// ```
///
/// Boundary rows keep only the inward term (one-sided, reflecting), so every
/// row still sums to zero.
pub fn ou_generator(ou: &OuProcess, grid: &Grid) -> TriDiag {
    let n = grid.n();
    let pts = grid.points();
    let db = grid.db();
    let diffusion = ou.eta * ou.sigma_m2 / (db * db);
    let mut a = TriDiag::zeros(n);
    for i in 0..n {
        let d = ou.eta * (ou.mu_m - pts[i]);
        let dp = d.max(0.0);
        let dm = d.min(0.0);
        if i == 0 {
            let up = dp / db + diffusion;
            a.upper[0] = up;
            a.diag[0] = -up;
        } else if i == n - 1 {
            let lo = -dm / db + diffusion;
            a.lower[n - 2] = lo;
            a.diag[n - 1] = -lo;
        } else {
            let up = dp / db + diffusion;
            let lo = -dm / db + diffusion;
            a.upper[i] = up;
            a.lower[i - 1] = lo;
            a.diag[i] = -(up + lo);
        }
    }
    a
}

/// Map the discrete-time demographic and persistence parameters into
/// continuous-time rates: `nu = -ln(1-delta)/dt`, `rho_tilde =
/// -ln(beta_tilde)/dt`, and the naive mean-reversion speed `eta_naive =
/// -ln(rho_ar)/dt`.
pub fn map_dt_to_ct(delta: f64, beta_tilde: f64, rho_ar: f64, dt: f64) -> Result<(f64, f64, f64)> {
    for (name, value, lo, hi) in [
        ("delta", delta, 0.0, 1.0),
        ("beta_tilde", beta_tilde, 0.0, 1.0),
        ("rho_ar", rho_ar, 0.0, 1.0),
    ] {
        if !(value > lo && value < hi) {
            return Err(Error::InvalidParameter {
                name,
                value,
                requirement: "must lie in (0,1)",
            });
        }
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            requirement: "must be > 0",
        });
    }
    Ok((
        -(1.0 - delta).ln() / dt,
        -beta_tilde.ln() / dt,
        -rho_ar.ln() / dt,
    ))
}

/// Demographic and timing constants shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Demographics {
    /// Per-period exit probability.
    pub delta: f64,
    /// Continuous exit hazard, `-ln(1-delta)/dt`.
    pub nu: f64,
    /// Pure time discount factor.
    pub beta_tilde: f64,
    /// Effective discount factor, `beta_tilde*(1-delta)`.
    pub beta: f64,
    /// Pure discount rate, `-ln(beta_tilde)/dt`.
    pub rho_tilde: f64,
    /// Effective discount rate, `rho_tilde + nu`.
    pub rho: f64,
    /// Meeting rate of singles.
    pub lambda: f64,
    /// Period length.
    pub dt: f64,
}

impl Demographics {
    /// Derive all rates from the primitive `(delta, beta_tilde, lambda, dt)`.
    pub fn from_primitives(delta: f64, beta_tilde: f64, lambda: f64, dt: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                requirement: "must be >= 0",
            });
        }
        // Domain checks for delta, beta_tilde, dt happen in the mapping; the
        // rho_ar slot is irrelevant here.
        let (nu, rho_tilde, _) = map_dt_to_ct(delta, beta_tilde, 0.5, dt)?;
        Ok(Demographics {
            delta,
            nu,
            beta_tilde,
            beta: beta_tilde * (1.0 - delta),
            rho_tilde,
            rho: rho_tilde + nu,
            lambda,
            dt,
        })
    }
}
