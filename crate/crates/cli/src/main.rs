//! `matchdyn` — command-line driver for the dual-method marriage-market
//! equilibrium solver.
//!
//! Subcommands: `solve` (one stationary year), `path` (the 1950–2020
//! price-trend path), `calibrate` (minimum-distance estimation of the
//! diffusion parameters), `bench` (the time/memory scaling sweep).
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver/runtime error,
//! 4 benchmark timeout. All outputs are deterministic for a given config;
//! the only exceptions are wall-clock timing columns, which the CSV schema
//! comments mark explicitly.

mod config;
mod report;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use matchdyn::experiments::{
    calibrate_ou, prices_at, run_benchmark, simulate_path, solve_year, BenchReport,
    CalibrationTargets, EquilibriumRow, Method, SolveSettings,
};
use matchdyn::params::ModelParams;

use config::{FlagOverrides, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "matchdyn",
    version,
    about = "Marriage-market equilibrium solver: matrix-chain and diffusion methods",
    propagate_version = true
)]
struct Cli {
    /// JSON config document of overrides; omitted fields take built-in defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (wins over `output_dir` in the config file).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Grid size (wins over `grid.n` in the config file).
    #[arg(long = "grid-n", global = true, value_name = "N")]
    grid_n: Option<usize>,

    /// Seed for the Monte-Carlo test oracles; recorded in the provenance
    /// log, never used by the commands themselves (outputs stay deterministic).
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one year's stationary equilibrium and write its CSV row.
    Solve {
        /// Calendar year on the price trend (e.g. 1950).
        #[arg(long)]
        year: i32,
        /// Which solver to run.
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Solve every year of the price trend and chart the path.
    Path {
        /// Which solver(s) to run.
        #[arg(long, value_enum, default_value_t = PathMethodArg::Both)]
        method: PathMethodArg,
    },
    /// Re-estimate the diffusion parameters by minimum distance from a
    /// deliberately naive starting point.
    Calibrate,
    /// Time/memory scaling sweep over grid sizes for both methods.
    Bench,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Ct,
    Dt,
}

impl From<MethodArg> for Method {
    fn from(arg: MethodArg) -> Method {
        match arg {
            MethodArg::Ct => Method::Ct,
            MethodArg::Dt => Method::Dt,
        }
    }
}

impl fmt::Display for MethodArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Method::from(*self))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PathMethodArg {
    Ct,
    Dt,
    Both,
}

impl PathMethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            PathMethodArg::Ct => vec![Method::Ct],
            PathMethodArg::Dt => vec![Method::Dt],
            PathMethodArg::Both => vec![Method::Ct, Method::Dt],
        }
    }
}

impl fmt::Display for PathMethodArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathMethodArg::Ct => "ct",
            PathMethodArg::Dt => "dt",
            PathMethodArg::Both => "both",
        })
    }
}

// ---------------------------------------------------------------------------
// Errors → exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    Config(config::ConfigError),
    Solver(matchdyn::Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::Io(path, e) => write!(f, "cannot write {}: {e}", path.display()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) | CliError::Io(_, _) => EXIT_SOLVER,
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<matchdyn::Error> for CliError {
    fn from(e: matchdyn::Error) -> Self {
        CliError::Solver(e)
    }
}

fn write_or_fail(path: &Path, write: impl FnOnce(&Path) -> std::io::Result<()>) -> Result<(), CliError> {
    write(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("matchdyn: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let flags = FlagOverrides {
        out: cli.out.clone(),
        grid_n: cli.grid_n,
    };
    let cfg = config::load(cli.config.as_deref(), &flags)?;
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Io(cfg.output_dir.clone(), e))?;

    let command_line = match &cli.command {
        Command::Solve { year, method } => format!("solve --year {year} --method {method}"),
        Command::Path { method } => format!("path --method {method}"),
        Command::Calibrate => "calibrate".to_string(),
        Command::Bench => "bench".to_string(),
    };
    let provenance_path = cfg.output_dir.join("provenance.txt");
    write_or_fail(&provenance_path, |p| {
        report::write_provenance(p, &command_line, cli.seed, &cfg)
    })?;

    match cli.command {
        Command::Solve { year, method } => cmd_solve(&cfg, year, method.into()),
        Command::Path { method } => cmd_path(&cfg, method),
        Command::Calibrate => cmd_calibrate(&cfg),
        Command::Bench => cmd_bench(&cfg),
    }
}

fn settings(cfg: &RunConfig) -> SolveSettings {
    SolveSettings {
        n: cfg.grid_n,
        n_std: cfg.n_std,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        pseudo_step: cfg.pseudo_step,
        damping: cfg.damping,
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_solve(cfg: &RunConfig, year: i32, method: Method) -> Result<u8, CliError> {
    // A year off the trend is a bad invocation, not a solver failure.
    let (w, p) = prices_at(&cfg.trend, year)
        .map_err(|e| config::ConfigError(format!("--year {year}: {e}")))?;
    let yearly = cfg.params.with_prices(w, p);
    let row = solve_year(&yearly, year, method, &settings(cfg))?;

    let csv_path = cfg.output_dir.join(format!("solve_{year}_{method}.csv"));
    write_or_fail(&csv_path, |p| {
        report::write_equilibrium_csv(p, std::slice::from_ref(&row))
    })?;

    let b_star = row
        .b_star
        .map(|b| format!(", threshold {b:.4}"))
        .unwrap_or_default();
    println!(
        "{year} {method}: married share {:.4}, marriage prob {:.4}, divorce prob {:.4}, \
         utility gap {:.4}{b_star} ({} grid points, {:.1} ms)",
        row.married_share, row.prob_marriage, row.prob_divorce, row.utility_gap, row.n_grid,
        row.solve_ms
    );
    println!("wrote {}", csv_path.display());
    Ok(0)
}

fn cmd_path(cfg: &RunConfig, method: PathMethodArg) -> Result<u8, CliError> {
    let methods = method.methods();
    let solve_settings = settings(cfg);
    let mut per_method: Vec<Vec<EquilibriumRow>> = Vec::new();
    for &m in &methods {
        per_method.push(simulate_path(&cfg.params, &cfg.trend, m, &solve_settings)?);
    }

    // Interleave year-major so each year's methods sit side by side.
    let years = per_method[0].len();
    let mut rows = Vec::with_capacity(methods.len() * years);
    for idx in 0..years {
        for col in &per_method {
            rows.push(col[idx].clone());
        }
    }

    let csv_path = cfg.output_dir.join("path.csv");
    write_or_fail(&csv_path, |p| report::write_equilibrium_csv(p, &rows))?;

    let series = |pick: fn(&EquilibriumRow) -> f64, label: &str| -> Vec<svg::Series> {
        methods
            .iter()
            .zip(&per_method)
            .map(|(m, col)| svg::Series {
                label: format!("{label} ({m})"),
                points: col.iter().map(|r| (r.year as f64, pick(r))).collect(),
            })
            .collect()
    };

    let shares_path = cfg.output_dir.join("path_shares.svg");
    let shares_svg = svg::render(&[
        svg::Panel {
            title: "Married share".to_string(),
            x_label: "year".to_string(),
            y_label: "share of population married".to_string(),
            log_log: false,
            series: series(|r| r.married_share, "married share"),
        },
        svg::Panel {
            title: "Marriage surplus".to_string(),
            x_label: "year".to_string(),
            y_label: "married-minus-single utility gap".to_string(),
            log_log: false,
            series: series(|r| r.utility_gap, "utility gap"),
        },
    ]);
    write_or_fail(&shares_path, |p| std::fs::write(p, &shares_svg))?;

    let rates_path = cfg.output_dir.join("path_rates.svg");
    let mut rate_series = series(|r| r.prob_marriage, "marriage prob");
    rate_series.extend(series(|r| r.prob_divorce, "divorce prob"));
    let rates_svg = svg::render(&[svg::Panel {
        title: "Annual transition probabilities".to_string(),
        x_label: "year".to_string(),
        y_label: "probability per year".to_string(),
        log_log: false,
        series: rate_series,
    }]);
    write_or_fail(&rates_path, |p| std::fs::write(p, &rates_svg))?;

    for (m, col) in methods.iter().zip(&per_method) {
        let first = col.first().expect("the trend has at least one year");
        let last = col.last().expect("the trend has at least one year");
        println!(
            "{m}: married share {:.4} ({}) -> {:.4} ({}) over {} years",
            first.married_share,
            first.year,
            last.married_share,
            last.year,
            col.len()
        );
    }
    println!(
        "wrote {}, {}, {}",
        csv_path.display(),
        shares_path.display(),
        rates_path.display()
    );
    Ok(0)
}

fn cmd_calibrate(cfg: &RunConfig) -> Result<u8, CliError> {
    let start = ModelParams::naive_ou();
    let targets = CalibrationTargets::baseline();
    let weights = [1.0; 6];
    let result = calibrate_ou(
        &cfg.params,
        &cfg.trend,
        &targets,
        &start,
        &weights,
        &settings(cfg),
    )?;

    let csv_path = cfg.output_dir.join("calibration.csv");
    write_or_fail(&csv_path, |p| report::write_calibration_csv(p, &result))?;
    let json_path = cfg.output_dir.join("calibration.json");
    write_or_fail(&json_path, |p| report::write_calibration_json(p, &result))?;

    println!(
        "start: mu_m {:.6}, sigma_m2 {:.6}, eta {:.6} (loss {:.6e})",
        start.mu_m, start.sigma_m2, start.eta, result.start_loss
    );
    println!(
        "estimate: mu_m {:.6}, sigma_m2 {:.6}, eta {:.6} (loss {:.6e})",
        result.ou.mu_m, result.ou.sigma_m2, result.ou.eta, result.loss
    );
    println!(
        "{} iterations, {} objective evaluations; estimate written to {} (re-readable via --config)",
        result.iterations,
        result.evaluations,
        json_path.display()
    );
    println!("wrote {}", csv_path.display());
    if !result.converged {
        eprintln!(
            "matchdyn: calibration stopped at its iteration budget before meeting tolerance; \
             outputs hold the best point found"
        );
        return Ok(EXIT_SOLVER);
    }
    Ok(0)
}

fn cmd_bench(cfg: &RunConfig) -> Result<u8, CliError> {
    let report = run_benchmark(
        &cfg.params,
        &[Method::Ct, Method::Dt],
        &cfg.bench_n_values,
        cfg.bench_repeats,
        cfg.bench_timeout_s,
        &settings(cfg),
    )?;

    let csv_path = cfg.output_dir.join("bench.csv");
    write_or_fail(&csv_path, |p| {
        report::write_bench_csv(p, &report, cfg.bench_repeats)
    })?;
    let svg_path = cfg.output_dir.join("bench.svg");
    write_or_fail(&svg_path, |p| std::fs::write(p, bench_svg(&report)))?;

    for method in [Method::Ct, Method::Dt] {
        let time = slope_text(report.time_slope(method));
        let mem = slope_text(report.mem_slope(method));
        println!("{method}: time slope {time}, memory slope {mem}");
    }
    println!("wrote {}, {}", csv_path.display(), svg_path.display());

    if report.cells.iter().any(|c| c.timed_out) {
        eprintln!("matchdyn: one or more benchmark cells hit the timeout; see bench.csv");
        return Ok(EXIT_TIMEOUT);
    }
    Ok(0)
}

fn slope_text(slope: Option<f64>) -> String {
    slope
        .map(|s| format!("{s:.2}"))
        .unwrap_or_else(|| "n/a".to_string())
}

/// Two log-log panels (time and memory vs grid size) with the fitted
/// exponents spelled out in the legend labels.
fn bench_svg(report: &BenchReport) -> String {
    let series = |pick: fn(&matchdyn::experiments::BenchCell) -> f64,
                  slope: fn(&BenchReport, Method) -> Option<f64>|
     -> Vec<svg::Series> {
        [Method::Ct, Method::Dt]
            .iter()
            .map(|&m| svg::Series {
                label: format!("{m} (slope {})", slope_text(slope(report, m))),
                points: report
                    .cells
                    .iter()
                    .filter(|c| c.method == m && !c.timed_out)
                    .map(|c| (c.n as f64, pick(c)))
                    .collect(),
            })
            .collect()
    };
    svg::render(&[
        svg::Panel {
            title: "Solve time".to_string(),
            x_label: "grid size n".to_string(),
            y_label: "median seconds".to_string(),
            log_log: true,
            series: series(|c| c.median_time_s, BenchReport::time_slope),
        },
        svg::Panel {
            title: "Working set".to_string(),
            x_label: "grid size n".to_string(),
            y_label: "peak bytes".to_string(),
            log_log: true,
            series: series(|c| c.peak_bytes as f64, BenchReport::mem_slope),
        },
    ])
}
