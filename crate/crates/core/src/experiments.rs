//! Quantitative exercises built on the two solvers: the 1950–2020
//! secular-trend path, minimum-distance re-estimation of the diffusion
//! parameters, and the time/memory scaling benchmark.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::ct_model;
use crate::dt_model::{self, StationaryMode};
use crate::error::{Error, Result};
use crate::match_process::OuProcess;
use crate::numerics::{loglog_slope, minimize_simplex, TracePoint};
use crate::params::ModelParams;

/// Which solver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ct,
    Dt,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ct => "ct",
            Method::Dt => "dt",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ct" => Ok(Method::Ct),
            "dt" => Ok(Method::Dt),
            other => Err(format!("unknown method '{other}' (expected 'ct' or 'dt')")),
        }
    }
}

/// How the price trends evolve from their 1950 anchors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendForm {
    /// Compound growth: `w_t = w_1950 (1+dw)^t`, `p_t = p_1950 (1+dp)^{-t}`.
    Geometric,
    /// Arithmetic increments: `w_t = w_1950 + dw t`, `p_t = p_1950 - dp t`
    /// (errors once the price would stop being positive).
    Linear,
}

/// Wage and home-price trends over a year range.
#[derive(Debug, Clone, Copy)]
pub struct TrendPath {
    pub w_1950: f64,
    pub dw: f64,
    pub p_1950: f64,
    pub dp: f64,
    pub year_start: i32,
    pub year_end: i32,
    pub form: TrendForm,
}

impl TrendPath {
    /// The 1950–2020 path at the calibrated anchors and rates.
    pub fn baseline() -> Self {
        TrendPath {
            w_1950: 1.000,
            dw: 0.022,
            p_1950: 9.959,
            dp: 0.059,
            year_start: 1950,
            year_end: 2020,
            form: TrendForm::Geometric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w_1950 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "trend.w_1950",
                value: self.w_1950,
                requirement: "must be > 0",
            });
        }
        if !(self.p_1950 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "trend.p_1950",
                value: self.p_1950,
                requirement: "must be > 0",
            });
        }
        if !self.dw.is_finite() {
            return Err(Error::InvalidParameter {
                name: "trend.dw",
                value: self.dw,
                requirement: "must be finite",
            });
        }
        if !self.dp.is_finite() {
            return Err(Error::InvalidParameter {
                name: "trend.dp",
                value: self.dp,
                requirement: "must be finite",
            });
        }
        if self.year_end < self.year_start {
            return Err(Error::InvalidInput(format!(
                "trend year range {}..={} is empty",
                self.year_start, self.year_end
            )));
        }
        Ok(())
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.year_start..=self.year_end
    }
}

/// Prices `(w, p)` implied by the trend at `year`.
pub fn prices_at(path: &TrendPath, year: i32) -> Result<(f64, f64)> {
    path.validate()?;
    if year < path.year_start {
        return Err(Error::InvalidInput(format!(
            "year {year} is before the trend start {}",
            path.year_start
        )));
    }
    let t = f64::from(year - path.year_start);
    let (w, p) = match path.form {
        TrendForm::Geometric => (
            path.w_1950 * (1.0 + path.dw).powf(t),
            path.p_1950 * (1.0 + path.dp).powf(-t),
        ),
        TrendForm::Linear => (path.w_1950 + path.dw * t, path.p_1950 - path.dp * t),
    };
    if !(w > 0.0) {
        return Err(Error::InvalidParameter {
            name: "w",
            value: w,
            requirement: "trend drove the wage non-positive",
        });
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            requirement: "trend drove the home-good price non-positive",
        });
    }
    Ok((w, p))
}

/// Grid and solver settings shared by the exercises.
#[derive(Debug, Clone, Copy)]
pub struct SolveSettings {
    /// Grid points.
    pub n: usize,
    /// Half-width of the continuous-time grid in standard deviations.
    pub n_std: f64,
    /// Sup-norm tolerance of the iterative solvers.
    pub tol: f64,
    /// Iteration budget of the discrete-time value iteration.
    pub max_iter: usize,
    /// Pseudo-time step of the continuous-time implicit scheme.
    pub pseudo_step: f64,
    /// Outer-loop damping of the continuous-time singles'-value update.
    pub damping: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            n: 501,
            n_std: ct_model::DEFAULT_N_STD,
            tol: 1e-9,
            max_iter: dt_model::DEFAULT_MAX_ITER,
            pseudo_step: ct_model::DEFAULT_PSEUDO_STEP,
            damping: ct_model::DEFAULT_DAMPING,
        }
    }
}

/// One solved stationary equilibrium, as reported to tables and charts.
#[derive(Debug, Clone)]
pub struct EquilibriumRow {
    pub year: i32,
    pub method: Method,
    pub married_share: f64,
    pub prob_marriage: f64,
    pub prob_divorce: f64,
    pub utility_gap: f64,
    /// Threshold match quality; populated by the continuous-time solver only.
    pub b_star: Option<f64>,
    pub n_grid: usize,
    pub solve_ms: f64,
}

/// Solve one year with the chosen method and package the reported row.
pub fn solve_year(
    params: &ModelParams,
    year: i32,
    method: Method,
    settings: &SolveSettings,
) -> Result<EquilibriumRow> {
    let start = Instant::now();
    let row = match method {
        Method::Dt => {
            let sol = dt_model::solve(
                params,
                settings.n,
                settings.tol,
                settings.max_iter,
                StationaryMode::ClosedForm,
            )?;
            EquilibriumRow {
                year,
                method,
                married_share: 1.0 - sol.s,
                prob_marriage: sol.prob_marriage,
                prob_divorce: sol.prob_divorce,
                utility_gap: sol.utility_gap,
                b_star: None,
                n_grid: settings.n,
                solve_ms: 0.0,
            }
        }
        Method::Ct => {
            let sol = ct_model::solve(
                params,
                settings.n,
                settings.n_std,
                settings.pseudo_step,
                settings.tol,
                settings.damping,
            )?;
            EquilibriumRow {
                year,
                method,
                married_share: 1.0 - sol.s,
                prob_marriage: sol.prob_marriage,
                prob_divorce: sol.prob_divorce,
                utility_gap: sol.utility_gap,
                b_star: Some(sol.b_star),
                n_grid: settings.n,
                solve_ms: 0.0,
            }
        }
    };
    Ok(EquilibriumRow {
        solve_ms: start.elapsed().as_secs_f64() * 1e3,
        ..row
    })
}

/// Solve every year of the trend as an independent stationary equilibrium.
///
/// Each year recomputes `(w, p)` from the trend and re-solves from scratch;
/// errors are annotated with the offending year.
pub fn simulate_path(
    params: &ModelParams,
    path: &TrendPath,
    method: Method,
    settings: &SolveSettings,
) -> Result<Vec<EquilibriumRow>> {
    path.validate()?;
    let mut rows = Vec::with_capacity((path.year_end - path.year_start + 1) as usize);
    for year in path.years() {
        let (w, p) = prices_at(path, year).map_err(|e| e.at_year(year))?;
        let yearly = params.with_prices(w, p);
        let row = solve_year(&yearly, year, method, settings).map_err(|e| e.at_year(year))?;
        rows.push(row);
    }
    Ok(rows)
}

/// The six calibration targets: (married share, divorce probability,
/// marriage probability), first for 1950 and then for 2000.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationTargets {
    pub married_1950: f64,
    pub prob_divorce_1950: f64,
    pub prob_marriage_1950: f64,
    pub married_2000: f64,
    pub prob_divorce_2000: f64,
    pub prob_marriage_2000: f64,
}

impl CalibrationTargets {
    /// The observed 1950/2000 moments the diffusion parameters are fit to.
    pub fn baseline() -> Self {
        CalibrationTargets {
            married_1950: 0.816,
            prob_divorce_1950: 0.011,
            prob_marriage_1950: 0.211,
            married_2000: 0.625,
            prob_divorce_2000: 0.023,
            prob_marriage_2000: 0.082,
        }
    }

    fn as_array(&self) -> [f64; 6] {
        [
            self.married_1950,
            self.prob_divorce_1950,
            self.prob_marriage_1950,
            self.married_2000,
            self.prob_divorce_2000,
            self.prob_marriage_2000,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("targets.married_1950", self.married_1950),
            ("targets.prob_divorce_1950", self.prob_divorce_1950),
            ("targets.prob_marriage_1950", self.prob_marriage_1950),
            ("targets.married_2000", self.married_2000),
            ("targets.prob_divorce_2000", self.prob_divorce_2000),
            ("targets.prob_marriage_2000", self.prob_marriage_2000),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    requirement: "must be > 0",
                });
            }
        }
        Ok(())
    }
}

/// Loss assigned to parameter draws where the solver cannot run (invalid
/// domain or solver failure); large enough that the simplex retreats.
const PENALTY_LOSS: f64 = 1e6;
/// Simplex convergence tolerance on the parameter diameter.
const CALIBRATION_TOL: f64 = 1e-5;
/// Simplex iteration budget.
const CALIBRATION_MAX_ITER: usize = 400;
/// Initial simplex scale relative to the starting point.
const CALIBRATION_SCALE: f64 = 0.05;

/// Result of the minimum-distance estimation.
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    /// Estimated diffusion parameters.
    pub ou: OuProcess,
    /// Weighted sum of squared proportional deviations at the estimate.
    pub loss: f64,
    /// Same loss at the starting point.
    pub start_loss: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Whether the simplex met its tolerance within the iteration budget;
    /// if false, the returned estimate is the best point found.
    pub converged: bool,
    /// Best-so-far loss per accepted improvement, for the trace table.
    pub trace: Vec<TracePoint>,
}

/// Weighted proportional-deviation loss of the 1950/2000 moments at `ou`.
///
/// Any failure to solve — invalid parameters or a solver error at either
/// year — is penalized with a large finite loss rather than treated as
/// fatal, so the simplex can walk out of bad regions.
pub fn calibration_loss(
    params: &ModelParams,
    path: &TrendPath,
    targets: &CalibrationTargets,
    weights: &[f64; 6],
    settings: &SolveSettings,
    x: &[f64],
) -> f64 {
    let (mu_m, sigma_m2, eta) = (x[0], x[1], x[2]);
    let ou = match OuProcess::new(mu_m, sigma_m2, eta) {
        Ok(ou) => ou,
        Err(_) => return PENALTY_LOSS,
    };
    let candidate = params.with_ou(ou);
    let mut moments = [0.0; 6];
    for (slot, year) in [(0usize, 1950), (3usize, 2000)] {
        let (w, p) = match prices_at(path, year) {
            Ok(wp) => wp,
            Err(_) => return PENALTY_LOSS,
        };
        let yearly = candidate.with_prices(w, p);
        let sol = match ct_model::solve(
            &yearly,
            settings.n,
            settings.n_std,
            settings.pseudo_step,
            settings.tol,
            settings.damping,
        ) {
            Ok(sol) => sol,
            Err(_) => return PENALTY_LOSS,
        };
        moments[slot] = 1.0 - sol.s;
        moments[slot + 1] = sol.prob_divorce;
        moments[slot + 2] = sol.prob_marriage;
    }
    let t = targets.as_array();
    let mut loss = 0.0;
    for k in 0..6 {
        let dev = (moments[k] - t[k]) / t[k];
        loss += weights[k] * dev * dev;
    }
    loss
}

/// Minimum-distance estimation of `(mu_m, sigma_m2, eta)` against the six
/// 1950/2000 moments, holding every other parameter fixed.
///
/// Runs a Nelder–Mead simplex from `start`; each evaluation solves the
/// continuous-time equilibrium at 1950 and 2000 prices. Returns the argmin
/// with its loss, the loss at the start, and the improvement trace.
pub fn calibrate_ou(
    params: &ModelParams,
    path: &TrendPath,
    targets: &CalibrationTargets,
    start: &OuProcess,
    weights: &[f64; 6],
    settings: &SolveSettings,
) -> Result<CalibrationResult> {
    targets.validate()?;
    path.validate()?;
    let x0 = [start.mu_m, start.sigma_m2, start.eta];
    let objective = |x: &[f64]| calibration_loss(params, path, targets, weights, settings, x);
    let start_loss = objective(&x0);
    let scale: Vec<f64> = x0.iter().map(|v| CALIBRATION_SCALE * v).collect();
    let result = minimize_simplex(
        &objective,
        &x0,
        &scale,
        CALIBRATION_TOL,
        CALIBRATION_MAX_ITER,
    )?;
    let ou = OuProcess::new(result.x[0], result.x[1], result.x[2])?;
    Ok(CalibrationResult {
        ou,
        loss: result.fx,
        start_loss,
        iterations: result.iterations,
        evaluations: result.evaluations,
        converged: result.converged,
        trace: result.trace,
    })
}

/// One benchmark measurement: a (method, grid size) pair.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub method: Method,
    pub n: usize,
    /// Median wall time of the full solve over the completed repeats.
    pub median_time_s: f64,
    /// The solver's own working-set accounting (matrix and vector buffers).
    pub peak_bytes: usize,
    /// Repeats actually completed (equals the requested count unless the
    /// cell timed out).
    pub repeats: usize,
    pub timed_out: bool,
}

/// Benchmark sweep results plus fitted log-log slopes per method
/// (`None` when fewer than two cells of that method completed).
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub cells: Vec<BenchCell>,
    pub ct_time_slope: Option<f64>,
    pub dt_time_slope: Option<f64>,
    pub ct_mem_slope: Option<f64>,
    pub dt_mem_slope: Option<f64>,
}

impl BenchReport {
    pub fn time_slope(&self, method: Method) -> Option<f64> {
        match method {
            Method::Ct => self.ct_time_slope,
            Method::Dt => self.dt_time_slope,
        }
    }

    pub fn mem_slope(&self, method: Method) -> Option<f64> {
        match method {
            Method::Ct => self.ct_mem_slope,
            Method::Dt => self.dt_mem_slope,
        }
    }
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).expect("timings are finite"));
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// Time and size one full solve at grid size `n`.
///
/// The discrete-time solver runs in its fixed-point stationary mode here:
/// the dense linear solve is a cubic-cost validation path and would
/// contaminate the quadratic scaling this harness measures.
fn bench_run(params: &ModelParams, method: Method, n: usize, settings: &SolveSettings) -> Result<(f64, usize)> {
    let start = Instant::now();
    let peak = match method {
        Method::Dt => {
            dt_model::solve(
                params,
                n,
                settings.tol,
                settings.max_iter,
                StationaryMode::Iterate,
            )?
            .peak_bytes
        }
        Method::Ct => {
            ct_model::solve(
                params,
                n,
                settings.n_std,
                settings.pseudo_step,
                settings.tol,
                settings.damping,
            )?
            .peak_bytes
        }
    };
    Ok((start.elapsed().as_secs_f64(), peak))
}

/// Sweep grid sizes for each method, with one discarded warm-up run per
/// cell and the median over `repeats` timed runs.
///
/// A cell whose accumulated wall time exceeds `timeout_s` is marked and the
/// sweep continues; slopes are fitted over the cells that completed all
/// repeats. Cells run serially so timings do not contaminate each other.
pub fn run_benchmark(
    params: &ModelParams,
    methods: &[Method],
    n_values: &[usize],
    repeats: usize,
    timeout_s: f64,
    settings: &SolveSettings,
) -> Result<BenchReport> {
    if n_values.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "benchmark needs at least 4 grid sizes, got {}",
            n_values.len()
        )));
    }
    if !n_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "benchmark grid sizes must be strictly increasing".to_string(),
        ));
    }
    if repeats < 3 {
        return Err(Error::InvalidInput(format!(
            "benchmark needs at least 3 repeats, got {repeats}"
        )));
    }
    if !(timeout_s > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bench.timeout_s",
            value: timeout_s,
            requirement: "must be > 0",
        });
    }
    let mut cells = Vec::with_capacity(methods.len() * n_values.len());
    for &method in methods {
        for &n in n_values {
            let cell_start = Instant::now();
            let mut times = Vec::with_capacity(repeats);
            let mut peak_bytes = 0usize;
            let mut timed_out = false;
            // Warm-up run, discarded from the median.
            let (_, peak) = bench_run(params, method, n, settings)?;
            peak_bytes = peak_bytes.max(peak);
            for _ in 0..repeats {
                if cell_start.elapsed().as_secs_f64() > timeout_s {
                    timed_out = true;
                    break;
                }
                let (t, peak) = bench_run(params, method, n, settings)?;
                times.push(t);
                peak_bytes = peak_bytes.max(peak);
            }
            let median_time_s = if times.is_empty() {
                cell_start.elapsed().as_secs_f64()
            } else {
                median(&mut times)
            };
            cells.push(BenchCell {
                method,
                n,
                median_time_s,
                peak_bytes,
                repeats: times.len(),
                timed_out,
            });
        }
    }
    let slope_pair = |method: Method| -> (Option<f64>, Option<f64>) {
        let done: Vec<&BenchCell> = cells
            .iter()
            .filter(|c| c.method == method && !c.timed_out)
            .collect();
        if done.len() < 2 {
            return (None, None);
        }
        let ns: Vec<f64> = done.iter().map(|c| c.n as f64).collect();
        let ts: Vec<f64> = done.iter().map(|c| c.median_time_s).collect();
        let ms: Vec<f64> = done.iter().map(|c| c.peak_bytes as f64).collect();
        (loglog_slope(&ns, &ts).ok(), loglog_slope(&ns, &ms).ok())
    };
    let (ct_time_slope, ct_mem_slope) = slope_pair(Method::Ct);
    let (dt_time_slope, dt_mem_slope) = slope_pair(Method::Dt);
    Ok(BenchReport {
        cells,
        ct_time_slope,
        dt_time_slope,
        ct_mem_slope,
        dt_mem_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_match_anchors_at_the_start() {
        let path = TrendPath::baseline();
        let (w, p) = prices_at(&path, 1950).unwrap();
        assert_eq!(w, 1.000);
        assert_eq!(p, 9.959);
    }

    #[test]
    fn prices_one_step_geometric() {
        let path = TrendPath::baseline();
        let (w, p) = prices_at(&path, 1951).unwrap();
        assert!((w - 1.022).abs() < 1e-12);
        assert!((p - 9.959 / 1.059).abs() < 1e-12);
    }

    #[test]
    fn prices_monotone_over_the_path() {
        let path = TrendPath::baseline();
        let mut prev = prices_at(&path, 1950).unwrap();
        for year in 1951..=2020 {
            let cur = prices_at(&path, year).unwrap();
            assert!(cur.0 > prev.0, "wage must rise into {year}");
            assert!(cur.1 < prev.1, "price must fall into {year}");
            prev = cur;
        }
    }

    #[test]
    fn prices_linear_form() {
        let path = TrendPath {
            form: TrendForm::Linear,
            ..TrendPath::baseline()
        };
        let (w, p) = prices_at(&path, 1952).unwrap();
        assert!((w - (1.0 + 2.0 * 0.022)).abs() < 1e-12);
        assert!((p - (9.959 - 2.0 * 0.059)).abs() < 1e-12);
        // Far enough out the linearly falling price crosses zero: an error,
        // not a silent negative price.
        assert!(prices_at(&path, 2150).is_err());
    }

    #[test]
    fn prices_reject_years_before_the_anchor() {
        assert!(prices_at(&TrendPath::baseline(), 1949).is_err());
    }

    #[test]
    fn trend_validation_rejects_bad_anchors() {
        let mut path = TrendPath::baseline();
        path.p_1950 = 0.0;
        assert!(path.validate().is_err());
        let mut path = TrendPath::baseline();
        path.year_end = 1949;
        assert!(path.validate().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Ct, Method::Dt] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("both".parse::<Method>().is_err());
    }

    #[test]
    fn constant_trend_gives_identical_rows() {
        let params = ModelParams::baseline();
        let path = TrendPath {
            dw: 0.0,
            dp: 0.0,
            year_start: 1950,
            year_end: 1952,
            ..TrendPath::baseline()
        };
        let settings = SolveSettings {
            n: 101,
            ..SolveSettings::default()
        };
        let rows = simulate_path(&params, &path, Method::Dt, &settings).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows[1..] {
            assert_eq!(row.married_share, rows[0].married_share);
            assert_eq!(row.prob_marriage, rows[0].prob_marriage);
            assert_eq!(row.prob_divorce, rows[0].prob_divorce);
            assert_eq!(row.utility_gap, rows[0].utility_gap);
        }
    }

    #[test]
    fn benchmark_rejects_bad_sweeps() {
        let params = ModelParams::baseline();
        let settings = SolveSettings::default();
        let both = [Method::Ct, Method::Dt];
        assert!(run_benchmark(&params, &both, &[100, 200, 400], 3, 60.0, &settings).is_err());
        assert!(
            run_benchmark(&params, &both, &[100, 200, 400, 300], 3, 60.0, &settings).is_err()
        );
        assert!(
            run_benchmark(&params, &both, &[100, 200, 300, 400], 2, 60.0, &settings).is_err()
        );
    }

    #[test]
    fn tiny_benchmark_produces_slopes_and_monotone_times() {
        let params = ModelParams::baseline();
        let settings = SolveSettings::default();
        let report = run_benchmark(
            &params,
            &[Method::Ct, Method::Dt],
            &[31, 41, 61, 81],
            3,
            120.0,
            &settings,
        )
        .unwrap();
        assert_eq!(report.cells.len(), 8);
        assert!(report.cells.iter().all(|c| !c.timed_out));
        assert!(report.cells.iter().all(|c| c.repeats == 3));
        // Memory accounting is exact arithmetic in n, so even a tiny sweep
        // recovers the linear/quadratic storage split.
        let ct_mem = report.ct_mem_slope.unwrap();
        let dt_mem = report.dt_mem_slope.unwrap();
        assert!((0.8..=1.2).contains(&ct_mem), "ct memory slope {ct_mem}");
        assert!(dt_mem > 1.5, "dt memory slope {dt_mem}");
        assert!(report.ct_time_slope.is_some());
        assert!(report.dt_time_slope.is_some());
    }

    #[test]
    fn timeout_marks_cell_and_continues() {
        let params = ModelParams::baseline();
        let settings = SolveSettings::default();
        // A timeout shorter than any solve: every cell is marked, none
        // aborts the sweep.
        let report = run_benchmark(
            &params,
            &[Method::Ct],
            &[31, 41, 61, 81],
            3,
            1e-9,
            &settings,
        )
        .unwrap();
        assert_eq!(report.cells.len(), 4);
        assert!(report.cells.iter().all(|c| c.timed_out));
        assert!(report.ct_time_slope.is_none());
    }

    #[test]
    fn calibration_loss_penalizes_invalid_parameters() {
        let params = ModelParams::baseline();
        let path = TrendPath::baseline();
        let targets = CalibrationTargets::baseline();
        let weights = [1.0; 6];
        let settings = SolveSettings {
            n: 51,
            ..SolveSettings::default()
        };
        let bad = calibration_loss(&params, &path, &targets, &weights, &settings, &[0.9, -1.0, 0.1]);
        assert_eq!(bad, PENALTY_LOSS);
    }
}
