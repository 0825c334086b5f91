//! Structural parameters for one model year.

use crate::error::Result;
use crate::household::{HomeTechnology, Preferences};
use crate::match_process::{Ar1Process, Demographics, OuProcess, SinglesDraw};

/// Everything the solvers need for a single year: tastes, home technology,
/// match-quality processes, demographics, and that year's prices.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub prefs: Preferences,
    pub tech: HomeTechnology,
    /// Draw distribution faced by singles.
    pub singles: SinglesDraw,
    /// Discrete-time law of motion for married match quality.
    pub ar1: Ar1Process,
    /// Continuous-time law of motion for married match quality.
    pub ou: OuProcess,
    pub demo: Demographics,
    /// Wage.
    pub w: f64,
    /// Relative price of home goods.
    pub p: f64,
}

impl ModelParams {
    /// The baseline calibration at 1950 prices.
    ///
    /// The discrete-time block carries the original calibration; the
    /// continuous-time block carries the re-estimated diffusion parameters
    /// appropriate under continuous monitoring of match quality.
    pub fn baseline() -> ModelParams {
        ModelParams {
            prefs: Preferences {
                alpha: 0.278,
                zeta: -1.901,
                cbar: 0.131,
                phi: 0.766,
            },
            tech: HomeTechnology {
                theta: 0.206,
                kappa: 0.189,
            },
            singles: SinglesDraw {
                mu_s: -4.252,
                sigma_s2: 8.063,
            },
            ar1: Ar1Process {
                mu_m: 0.521,
                sigma_m2: 0.680,
                rho_ar: 0.896,
            },
            ou: OuProcess {
                mu_m: 0.951,
                sigma_m2: 0.83,
                eta: 0.113,
            },
            demo: Demographics::from_primitives(1.0 / 47.0, 0.96, 1.0, 1.0)
                .expect("baseline demographics are valid"),
            w: 1.0,
            p: 9.959,
        }
    }

    /// The naive continuous-time diffusion parameters: the discrete-time
    /// mean and variance reused literally, with mean reversion set by the
    /// first-order persistence mapping `-ln(rho_ar)/dt` (to the two-decimal
    /// precision used in the continuous-monitoring comparison).
    pub fn naive_ou() -> OuProcess {
        OuProcess {
            mu_m: 0.521,
            sigma_m2: 0.680,
            eta: 0.11,
        }
    }

    /// Copy of `self` with prices replaced.
    pub fn with_prices(&self, w: f64, p: f64) -> ModelParams {
        let mut out = *self;
        out.w = w;
        out.p = p;
        out
    }

    /// Copy of `self` with the continuous-time diffusion block replaced.
    pub fn with_ou(&self, ou: OuProcess) -> ModelParams {
        let mut out = *self;
        out.ou = ou;
        out
    }

    /// Validate every block (the baseline is valid by construction; configs
    /// built from user input go through this).
    pub fn validate(&self) -> Result<()> {
        self.prefs.validate()?;
        self.tech.validate()?;
        SinglesDraw::new(self.singles.mu_s, self.singles.sigma_s2)?;
        Ar1Process::new(self.ar1.mu_m, self.ar1.sigma_m2, self.ar1.rho_ar)?;
        OuProcess::new(self.ou.mu_m, self.ou.sigma_m2, self.ou.eta)?;
        Demographics::from_primitives(
            self.demo.delta,
            self.demo.beta_tilde,
            self.demo.lambda,
            self.demo.dt,
        )?;
        Ok(())
    }
}
