//! Output files: CSV tables, the calibration override document, and the
//! provenance log.
//!
//! Every writer produces byte-identical output for identical inputs; the
//! only run-to-run variation in any file is wall-clock timing columns,
//! which the schema comments call out explicitly.

use std::io;
use std::path::Path;

use matchdyn::experiments::{BenchReport, CalibrationResult, EquilibriumRow, Method};

use crate::config::{Provenance, RunConfig, Source};

/// Fixed header of the equilibrium tables (`solve_*.csv`, `path.csv`).
pub const EQUILIBRIUM_HEADER: &str =
    "year,method,married_share,prob_marriage,prob_divorce,utility_gap,b_star,n_grid,solve_ms";

/// Fixed header of `bench.csv`.
pub const BENCH_HEADER: &str = "method,n,median_time_s,peak_bytes,repeats";

/// Fixed header of `calibration.csv`.
pub const CALIBRATION_HEADER: &str = "iteration,loss,mu_m,sigma_m2,eta";

fn write_file(path: &Path, text: &str) -> io::Result<()> {
    std::fs::write(path, text)
}

/// Equilibrium rows (one per year/method) in the stable v1 schema.
pub fn equilibrium_csv(rows: &[EquilibriumRow]) -> String {
    let mut out = String::new();
    out.push_str("# schema: matchdyn-equilibrium-v1\n");
    out.push_str("# prob_marriage / prob_divorce are per-year probabilities; the diffusion\n");
    out.push_str("# method converts hazards h via 1 - exp(-h).\n");
    out.push_str("# b_star is the diffusion divorce threshold; empty for the chain method.\n");
    out.push_str("# solve_ms is a wall-clock timing column, exempt from determinism.\n");
    out.push_str(EQUILIBRIUM_HEADER);
    out.push('\n');
    for row in rows {
        let b_star = row
            .b_star
            .map(|b| format!("{b:.6}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{},{},{:.3}\n",
            row.year,
            row.method,
            row.married_share,
            row.prob_marriage,
            row.prob_divorce,
            row.utility_gap,
            b_star,
            row.n_grid,
            row.solve_ms
        ));
    }
    out
}

pub fn write_equilibrium_csv(path: &Path, rows: &[EquilibriumRow]) -> io::Result<()> {
    write_file(path, &equilibrium_csv(rows))
}

/// Benchmark table: one row per (method, n) cell plus one `slope` summary
/// row per method carrying the fitted log-log exponents.
pub fn bench_csv(report: &BenchReport, requested_repeats: usize) -> String {
    let mut out = String::new();
    out.push_str("# schema: matchdyn-bench-v1\n");
    out.push_str("# median_time_s is a wall-clock timing column, exempt from determinism.\n");
    out.push_str(&format!(
        "# cells with repeats < {requested_repeats} hit the per-cell timeout.\n"
    ));
    out.push_str("# rows with n = \"slope\" summarize a method: median_time_s carries the\n");
    out.push_str("# fitted time-vs-n exponent, peak_bytes the memory-vs-n exponent, and\n");
    out.push_str("# repeats the number of completed cells the fit used.\n");
    out.push_str(BENCH_HEADER);
    out.push('\n');
    for cell in &report.cells {
        out.push_str(&format!(
            "{},{},{:.6},{},{}\n",
            cell.method, cell.n, cell.median_time_s, cell.peak_bytes, cell.repeats
        ));
    }
    for method in [Method::Ct, Method::Dt] {
        let fitted = report
            .cells
            .iter()
            .filter(|c| c.method == method && !c.timed_out)
            .count();
        let fmt = |slope: Option<f64>| slope.map(|s| format!("{s:.6}")).unwrap_or_default();
        out.push_str(&format!(
            "{method},slope,{},{},{fitted}\n",
            fmt(report.time_slope(method)),
            fmt(report.mem_slope(method)),
        ));
    }
    out
}

pub fn write_bench_csv(path: &Path, report: &BenchReport, requested_repeats: usize) -> io::Result<()> {
    write_file(path, &bench_csv(report, requested_repeats))
}

/// Estimation trace: best-so-far loss and parameters per accepted
/// improvement of the simplex.
pub fn calibration_csv(result: &CalibrationResult) -> String {
    let mut out = String::new();
    out.push_str("# schema: matchdyn-calibration-v1\n");
    out.push_str("# best-so-far loss per accepted simplex improvement\n");
    out.push_str(CALIBRATION_HEADER);
    out.push('\n');
    for point in &result.trace {
        out.push_str(&format!(
            "{},{:.9e},{:.9},{:.9},{:.9}\n",
            point.iteration, point.best_f, point.best_x[0], point.best_x[1], point.best_x[2]
        ));
    }
    out
}

pub fn write_calibration_csv(path: &Path, result: &CalibrationResult) -> io::Result<()> {
    write_file(path, &calibration_csv(result))
}

/// The estimated diffusion parameters as a config override document: the
/// file parses back through `--config` and reproduces the fitted model.
pub fn calibration_json(result: &CalibrationResult) -> String {
    let doc = serde_json::json!({
        "params": {
            "mu_m_ct": result.ou.mu_m,
            "sigma_m2_ct": result.ou.sigma_m2,
            "eta": result.ou.eta,
        }
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("plain numbers serialize");
    text.push('\n');
    text
}

pub fn write_calibration_json(path: &Path, result: &CalibrationResult) -> io::Result<()> {
    write_file(path, &calibration_json(result))
}

/// Plain-text log of every resolved configuration field and its source.
pub fn provenance_text(command: &str, seed: Option<u64>, cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str("matchdyn effective configuration\n");
    out.push_str(&format!("command: {command}\n"));
    match seed {
        Some(s) => out.push_str(&format!(
            "seed: {s} (feeds the Monte-Carlo test oracles only; command outputs are deterministic)\n"
        )),
        None => out.push_str("seed: none\n"),
    }
    let width = cfg
        .provenance
        .iter()
        .map(|p| p.key.len())
        .max()
        .unwrap_or(0);
    for Provenance { key, value, source } in &cfg.provenance {
        let origin = match source {
            Source::Default => "default".to_string(),
            Source::ConfigFile => "config file".to_string(),
            Source::Flag => "command-line flag".to_string(),
        };
        out.push_str(&format!("{key:<width$} = {value}  [{origin}]\n"));
    }
    out
}

pub fn write_provenance(path: &Path, command: &str, seed: Option<u64>, cfg: &RunConfig) -> io::Result<()> {
    write_file(path, &provenance_text(command, seed, cfg))
}
