//! Error type shared across the solver library.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or solving a model instance.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A pivot fell below the singularity tolerance during factorization.
    #[error("singular matrix: pivot magnitude {pivot:.3e} below tolerance at row {row}")]
    SingularMatrix { row: usize, pivot: f64 },

    /// A parameter violated its domain (named, with the offending value).
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Malformed input that is not a single scalar parameter.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An objective returned NaN/inf during a bracketed scalar search.
    #[error("objective returned a non-finite value at x = {x}")]
    NonFiniteObjective { x: f64 },

    /// An iterative loop ran out of budget before reaching its tolerance.
    #[error("{what}: no convergence after {max_iter} iterations (last residual {residual:.3e})")]
    MaxIterationsExceeded {
        what: &'static str,
        max_iter: usize,
        residual: f64,
    },

    /// The household cannot afford minimum consumption at these prices.
    #[error("infeasible budget: full income {income} does not exceed minimum consumption {cbar}")]
    InfeasibleBudget { income: f64, cbar: f64 },

    /// The one-dimensional allocation reduction had no admissible interior point.
    #[error("no interior optimum: {0}")]
    NoInteriorOptimum(String),

    /// The singles draw puts too much mass outside the grid for a faithful fold-in.
    #[error("folded tail mass {mass:.3e} exceeds 0.01: grid too narrow for the singles draw")]
    TailMass { mass: f64 },

    /// A value vector that must be nondecreasing was not; thresholds are undefined.
    #[error("value vector decreases by {drop:.3e} at index {index}: threshold extraction undefined")]
    NonMonotoneValue { index: usize, drop: f64 },

    /// The unclamped implicit update, from which the continuous-time
    /// threshold is read, decreased materially; thresholds are undefined.
    #[error("unclamped update decreases by {drop:.3e} at index {index}: threshold extraction undefined")]
    NonMonotoneUnclamped { index: usize, drop: f64 },

    /// At convergence every grid point accepts: the threshold is below the grid.
    #[error("all grid points accept at convergence: threshold below the grid")]
    AllAccept,

    /// At convergence no grid point accepts: the threshold is above the grid.
    #[error("no grid point accepts at convergence: threshold above the grid")]
    AllReject,

    /// The married population is numerically empty; per-couple rates are undefined.
    #[error("married mass 1 - s = {mass:.3e} is numerically zero")]
    DegenerateMass { mass: f64 },

    /// The stationary density came back materially negative: broken generator.
    #[error("stationary density has negative entry {value:.3e} at index {index}")]
    NegativeDensity { index: usize, value: f64 },

    /// A benchmark cell exceeded its wall-clock budget.
    #[error("benchmark cell (method {method}, n = {n}) exceeded the {timeout_s} s timeout")]
    Timeout {
        method: &'static str,
        n: usize,
        timeout_s: f64,
    },

    /// A solver error annotated with the model year it occurred in.
    #[error("year {year}: {source}")]
    AtYear {
        year: i32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the model year a path simulation was solving.
    pub fn at_year(self, year: i32) -> Error {
        Error::AtYear {
            year,
            source: Box::new(self),
        }
    }
}
