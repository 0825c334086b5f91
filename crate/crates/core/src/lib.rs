//! Dual-method equilibrium solver for a marriage/divorce search model.
//!
//! A household is single or married; match quality evolves stochastically
//! while married, singles meet partners and accept matches above an
//! endogenous threshold, and divorce is the mirror decision. The crate
//! solves the stationary equilibrium two ways and lets them check each
//! other:
//!
//! * [`dt_model`] — discrete time: the match-quality process is discretized
//!   to a Markov chain, the Bellman system is solved by value iteration,
//!   and the stationary distribution comes from a dense linear solve over
//!   the full transition matrix (quadratic storage in the grid size).
//! * [`ct_model`] — continuous time: match quality follows a
//!   mean-reverting diffusion whose generator is tridiagonal, the value
//!   problem is an obstacle problem solved by a projected implicit scheme,
//!   and the stationary density comes from the forward equation (linear
//!   storage and time in the grid size).
//!
//! [`experiments`] builds the quantitative exercises on top: a 1950–2020
//! price-trend path solved year by year, minimum-distance estimation of the
//! diffusion parameters, and a scaling benchmark that measures the
//! linear-vs-quadratic cost split between the two methods.
//!
//! Supporting layers: [`numerics`] (tridiagonal and dense linear algebra,
//! normal distribution helpers, golden-section and Nelder–Mead minimizers,
//! log-log slope fits), [`household`] (the static time-allocation problem
//! behind the per-period utilities), [`match_process`] (grids,
//! discretizations, the diffusion generator, and rate mappings between the
//! two time conventions), and [`params`] (the calibrated parameter set).

// Deliberate idioms in the numerical kernels: `!(x > 0.0)` rejects NaN in
// one comparison, index-coupled loops walk several buffers in lockstep, and
// the solver entry points take their full parameter lists by design.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::explicit_counter_loop,
    clippy::too_many_arguments
)]

pub mod ct_model;
pub mod dt_model;
pub mod error;
pub mod experiments;
pub mod household;
pub mod match_process;
pub mod numerics;
pub mod params;

pub use error::{Error, Result};
