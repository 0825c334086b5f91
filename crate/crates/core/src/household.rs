//! Static household allocation problem.
//!
//! A household of size `z` splits time between market work and home
//! production, buys market consumption `c` and home-good inputs `d`, and
//! produces the home composite `n` from `(d, h)` through a CES aggregator:
//!
//! ```text
//! max  alpha * ln((c - cbar)/z^phi) + ((1-alpha)/zeta) * (n/z^phi)^zeta
//! s.t. c + w*p*d = w*(z - h)
//!      n = (theta*d^kappa + (1-theta)*h^kappa)^(1/kappa)
//! ```
//!
//! The first-order condition ties optimal inputs via `d/h =
//! ((1-theta)*p/theta)^(1/(kappa-1))`, which reduces the problem to one
//! dimension in home hours `h`; that reduction is minimized with a bracketed
//! golden-section search.

use crate::error::{Error, Result};
use crate::numerics::minimize_scalar;

/// Taste parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preferences {
    /// Consumption weight, in (0,1).
    pub alpha: f64,
    /// Home-composite curvature, < 1 and nonzero.
    pub zeta: f64,
    /// Minimum consumption level (per household).
    pub cbar: f64,
    /// Household-scale exponent.
    pub phi: f64,
}

impl Preferences {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                requirement: "must lie in (0,1)",
            });
        }
        if !(self.zeta < 1.0) || self.zeta == 0.0 {
            return Err(Error::InvalidParameter {
                name: "zeta",
                value: self.zeta,
                requirement: "must be < 1 and nonzero",
            });
        }
        if !(self.cbar >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "cbar",
                value: self.cbar,
                requirement: "must be >= 0",
            });
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: self.phi,
                requirement: "must be finite",
            });
        }
        Ok(())
    }
}

/// CES home-production technology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomeTechnology {
    /// Home-goods share, in (0,1).
    pub theta: f64,
    /// Substitutability between goods and hours, < 1 and nonzero.
    pub kappa: f64,
}

impl HomeTechnology {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: self.theta,
                requirement: "must lie in (0,1)",
            });
        }
        if !(self.kappa < 1.0) || self.kappa == 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: self.kappa,
                requirement: "must be < 1 and nonzero",
            });
        }
        Ok(())
    }
}

/// An optimal bundle together with its utility value.
#[derive(Debug, Clone, Copy)]
pub struct Allocation {
    /// Market consumption.
    pub c: f64,
    /// Home-good purchases.
    pub d: f64,
    /// Home hours.
    pub h: f64,
    /// Market hours, `z - h`.
    pub l: f64,
    /// Home composite output.
    pub n: f64,
    /// Maximized utility.
    pub value: f64,
    /// Set when the interior search ended on the edge of its bracket;
    /// returned instead of failing so path simulations survive extreme
    /// prices.
    pub boundary: bool,
}

fn check_z(z: u32) -> Result<f64> {
    if z == 1 || z == 2 {
        Ok(f64::from(z))
    } else {
        Err(Error::InvalidParameter {
            name: "z",
            value: f64::from(z),
            requirement: "household size must be 1 or 2",
        })
    }
}

/// Tolerance of the one-dimensional search over `h`.
const H_TOL: f64 = 1e-10;
/// Distance from the bracket edge at which a solution is flagged boundary.
const EDGE_TOL: f64 = 1e-9;

/// Solve the allocation problem for household size `z` at prices `(p, w)`.
pub fn solve_allocation(
    prefs: &Preferences,
    tech: &HomeTechnology,
    p: f64,
    w: f64,
    z: u32,
) -> Result<Allocation> {
    prefs.validate()?;
    tech.validate()?;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            requirement: "must be > 0",
        });
    }
    if !(w > 0.0) {
        return Err(Error::InvalidParameter {
            name: "w",
            value: w,
            requirement: "must be > 0",
        });
    }
    let zf = check_z(z)?;
    let income = w * zf;
    if income <= prefs.cbar {
        return Err(Error::InfeasibleBudget {
            income,
            cbar: prefs.cbar,
        });
    }

    // d = r*h at the optimum; the composite collapses to n = q*h and the
    // budget to c = w*(z - h*cost).
    let r = ((1.0 - tech.theta) * p / tech.theta).powf(1.0 / (tech.kappa - 1.0));
    let q = (tech.theta * r.powf(tech.kappa) + (1.0 - tech.theta)).powf(1.0 / tech.kappa);
    let cost = 1.0 + p * r;
    let zscale = zf.powf(prefs.phi);

    // Feasible hours: h > 0 and c > cbar.
    let h_budget = (income - prefs.cbar) / (w * cost);
    let h_hi = zf.min(h_budget) * (1.0 - 1e-12);
    let h_lo = 1e-12;
    if h_hi <= h_lo {
        return Err(Error::NoInteriorOptimum(format!(
            "no feasible home hours: bracket [{h_lo:.3e}, {h_hi:.3e}] at p={p}, w={w}, z={z}"
        )));
    }

    let utility = |h: f64| -> f64 {
        let c = w * (zf - h * cost);
        let slack = c - prefs.cbar;
        if slack <= 0.0 || h <= 0.0 {
            return f64::NEG_INFINITY;
        }
        prefs.alpha * (slack / zscale).ln()
            + (1.0 - prefs.alpha) / prefs.zeta * (q * h / zscale).powf(prefs.zeta)
    };

    let h = minimize_scalar(|h| -utility(h), h_lo, h_hi, H_TOL)?;
    let c = w * (zf - h * cost);
    let boundary = h - h_lo <= EDGE_TOL || h_hi - h <= EDGE_TOL;
    Ok(Allocation {
        c,
        d: r * h,
        h,
        l: zf - h,
        n: q * h,
        value: utility(h),
        boundary,
    })
}

/// Maximized utility `v(p, w, z)`.
pub fn indirect_utility(
    prefs: &Preferences,
    tech: &HomeTechnology,
    p: f64,
    w: f64,
    z: u32,
) -> Result<f64> {
    Ok(solve_allocation(prefs, tech, p, w, z)?.value)
}
