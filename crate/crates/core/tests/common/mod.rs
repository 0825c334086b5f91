//! Shared oracles for the integration suites: seeded RNG construction,
//! agent-level Monte-Carlo simulators for both time conventions, and an
//! independent series implementation of the error function.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use matchdyn::match_process::{build_grid, ou_generator};
use matchdyn::numerics::{dense_solve, DenseMatrix};
use matchdyn::params::ModelParams;

/// Deterministic per-oracle RNG. The base seed can be overridden through
/// `MATCHDYN_TEST_SEED`; the tag separates streams so oracles stay
/// independent of each other and of test execution order.
pub fn test_rng(tag: &str) -> ChaCha8Rng {
    let base: u64 = std::env::var("MATCHDYN_TEST_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_260_815);
    // FNV-1a over the tag.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in tag.bytes() {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(base ^ h)
}

/// Discrete-time agent simulation of the marriage market, entirely
/// independent of the solver's grids and matrices.
///
/// Each period, married agents draw next-period quality from the
/// autoregression and divorce below `cutoff`; single agents draw a partner
/// and accept at or above it; everyone then dies with the per-period exit
/// probability and re-enters single. Returns the time-averaged singles
/// share after `burn_in` periods.
///
/// `cutoff` should be the solver's threshold shifted up by half a grid
/// cell: the transition matrix splits the threshold *bin* by the
/// interpolation weight, and the bin spans half a cell on either side of
/// its node, so the continuum cutoff equivalent to that bookkeeping sits
/// half a cell above the node-anchored threshold.
pub fn dt_mc_singles_share(
    params: &ModelParams,
    cutoff: f64,
    n_agents: usize,
    periods: usize,
    burn_in: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let ar = params.ar1;
    let step_sd = ar.sigma() * (1.0 - ar.rho_ar * ar.rho_ar).sqrt();
    let (mu_s, sig_s) = (params.singles.mu_s, params.singles.sigma());
    let delta = params.demo.delta;
    let mut married = vec![false; n_agents];
    let mut quality = vec![0.0f64; n_agents];
    let mut singles_time = 0.0f64;
    let mut count = 0usize;
    for t in 0..periods {
        for i in 0..n_agents {
            if married[i] {
                let shock: f64 = rng.sample(StandardNormal);
                let next = (1.0 - ar.rho_ar) * ar.mu_m + ar.rho_ar * quality[i] + step_sd * shock;
                quality[i] = next;
                if next < cutoff {
                    married[i] = false;
                }
            } else {
                let shock: f64 = rng.sample(StandardNormal);
                let draw = mu_s + sig_s * shock;
                if draw >= cutoff {
                    married[i] = true;
                    quality[i] = draw;
                }
            }
            if rng.gen::<f64>() < delta {
                married[i] = false;
            }
        }
        if t >= burn_in {
            singles_time += married.iter().filter(|m| !**m).count() as f64 / n_agents as f64;
            count += 1;
        }
    }
    singles_time / count as f64
}

/// Continuous-time agent simulation: meetings and deaths arrive by
/// exponential clocks; while married, quality follows the exact transition
/// law of the mean-reverting diffusion on a fine time step, divorcing the
/// first time it is observed below `b_star`. Deaths re-enter single.
/// Returns the fraction of post-burn-in person-time spent single.
pub fn ct_mc_singles_share(
    params: &ModelParams,
    b_star: f64,
    n_agents: usize,
    years: f64,
    burn_years: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let ou = params.ou;
    let (mu_s, sig_s) = (params.singles.mu_s, params.singles.sigma());
    let (nu, lambda) = (params.demo.nu, params.demo.lambda);
    let sigma_m = ou.sigma();
    let decay = (-ou.eta * dt).exp();
    let shock_sd = sigma_m * (1.0 - decay * decay).sqrt();
    let death_clock = Exp::new(nu).expect("nu > 0");
    let meet_clock = Exp::new(lambda).expect("lambda > 0");
    let mut singles_time = 0.0f64;
    // Credit the post-burn-in part of the stay [from, to) as single time.
    let credit = |from: f64, to: f64| (to - from.max(burn_years)).max(0.0);
    for _ in 0..n_agents {
        let mut t = 0.0f64;
        let mut next_death = death_clock.sample(rng);
        let mut married_quality: Option<f64> = None;
        while t < years {
            match married_quality {
                None => {
                    let next_meet = t + meet_clock.sample(rng);
                    let stop = next_meet.min(next_death).min(years);
                    singles_time += credit(t, stop);
                    t = stop;
                    if t >= years {
                        break;
                    }
                    if next_death <= next_meet {
                        next_death = t + death_clock.sample(rng);
                    } else {
                        let shock: f64 = rng.sample(StandardNormal);
                        let draw = mu_s + sig_s * shock;
                        if draw > b_star {
                            married_quality = Some(draw);
                        }
                    }
                }
                Some(mut b) => {
                    while t < years {
                        if t >= next_death {
                            next_death = t + death_clock.sample(rng);
                            married_quality = None;
                            break;
                        }
                        let shock: f64 = rng.sample(StandardNormal);
                        b = ou.mu_m + (b - ou.mu_m) * decay + shock_sd * shock;
                        t += dt;
                        if b < b_star {
                            married_quality = None;
                            break;
                        }
                        married_quality = Some(b);
                    }
                }
            }
        }
    }
    singles_time / (n_agents as f64 * (years - burn_years))
}

/// One-step Monte-Carlo of the autoregression from a grid node, binned with
/// the same midpoint edges the discretization uses (end bins absorb tails).
pub fn ar1_row_mc(
    mu_m: f64,
    sigma_m: f64,
    rho: f64,
    grid: &[f64],
    from: usize,
    n_draws: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = grid.len();
    let db = grid[1] - grid[0];
    let cond_mean = (1.0 - rho) * mu_m + rho * grid[from];
    let cond_sd = sigma_m * (1.0 - rho * rho).sqrt();
    let mut counts = vec![0usize; n];
    for _ in 0..n_draws {
        let shock: f64 = rng.sample(StandardNormal);
        let x = cond_mean + cond_sd * shock;
        let k = ((x - grid[0]) / db + 0.5).floor();
        let k = (k.max(0.0) as usize).min(n - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .map(|c| c as f64 / n_draws as f64)
        .collect()
}

/// Sup-norm gap between the diffusion generator's discrete stationary
/// density and the analytic normal law, on an `n`-point grid spanning six
/// standard deviations at the baseline parameters.
///
/// The rows of the adjoint system sum to zero (the generator's own rows
/// do), so one equation is redundant; it is replaced by the normalization
/// `sum(m)*db = 1` and the dense system is solved directly.
pub fn ou_stationary_gap(n: usize) -> f64 {
    let ou = ModelParams::baseline().ou;
    let grid = build_grid(ou.mu_m, ou.sigma(), 6.0, f64::INFINITY, n).unwrap();
    let a = ou_generator(&ou, &grid);
    let mut sys = DenseMatrix::from_tridiag(&a.transpose());
    let db = grid.db();
    for c in 0..n {
        sys.set(n - 1, c, db);
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    let dens = dense_solve(&sys, &rhs).unwrap();

    let sd = ou.sigma();
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
    dens.iter()
        .zip(grid.points())
        .map(|(d, b)| {
            let z = (b - ou.mu_m) / sd;
            (d - norm * (-0.5 * z * z).exp()).abs()
        })
        .fold(0.0f64, f64::max)
}

/// Error function by Taylor series, for cross-checking the library's
/// complementary error function. Accurate to ~1e-13 for |x| <= 2.5
/// (alternating-series cancellation grows like exp(x^2) beyond that).
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x2 / kf;
        let contribution = term / (2.0 * kf + 1.0);
        sum += contribution;
        if contribution.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum * std::f64::consts::FRAC_2_SQRT_PI
}
