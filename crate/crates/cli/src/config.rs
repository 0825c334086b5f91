//! Configuration loading: a strict JSON document of overrides merged onto
//! the built-in defaults, with a provenance entry recorded for every
//! resolved field.
//!
//! Unknown keys are rejected (misspelled parameter names must not silently
//! fall back to defaults), and every domain violation names the field and
//! its bound.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use matchdyn::experiments::{TrendForm, TrendPath};
use matchdyn::match_process::{Ar1Process, Demographics, OuProcess, SinglesDraw};
use matchdyn::params::ModelParams;

/// A configuration error: bad syntax, an unknown key, or an out-of-domain
/// value. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Where a resolved value came from, for the provenance log.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub key: &'static str,
    pub value: String,
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Default,
    ConfigFile,
    Flag,
}

impl Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Default => write!(f, "default"),
            Source::ConfigFile => write!(f, "config file"),
            Source::Flag => write!(f, "command-line flag"),
        }
    }
}

/// The fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub grid_n: usize,
    pub n_std: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub pseudo_step: f64,
    pub damping: f64,
    pub trend: TrendPath,
    pub bench_n_values: Vec<usize>,
    pub bench_repeats: usize,
    pub bench_timeout_s: f64,
    pub output_dir: PathBuf,
    /// One entry per resolved field, in a fixed order.
    pub provenance: Vec<Provenance>,
}

// ---------------------------------------------------------------------------
// The override document. Every field is optional; unknown keys error out.
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    params: Option<PartialParams>,
    grid: Option<PartialGrid>,
    solver: Option<PartialSolver>,
    trend: Option<PartialTrend>,
    bench: Option<PartialBench>,
    output_dir: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialParams {
    alpha: Option<f64>,
    zeta: Option<f64>,
    cbar: Option<f64>,
    phi: Option<f64>,
    theta: Option<f64>,
    kappa: Option<f64>,
    mu_s: Option<f64>,
    sigma_s2: Option<f64>,
    mu_m: Option<f64>,
    sigma_m2: Option<f64>,
    rho_ar: Option<f64>,
    mu_m_ct: Option<f64>,
    sigma_m2_ct: Option<f64>,
    eta: Option<f64>,
    beta_tilde: Option<f64>,
    delta: Option<f64>,
    lambda: Option<f64>,
    dt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialGrid {
    n: Option<usize>,
    n_std: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialSolver {
    tol: Option<f64>,
    max_iter: Option<usize>,
    pseudo_step: Option<f64>,
    damping: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialTrend {
    w_1950: Option<f64>,
    dw: Option<f64>,
    p_1950: Option<f64>,
    dp: Option<f64>,
    year_start: Option<i32>,
    year_end: Option<i32>,
    form: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialBench {
    n_values: Option<Vec<usize>>,
    repeats: Option<usize>,
    timeout_s: Option<f64>,
}

/// Command-line overrides that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

struct Resolver {
    provenance: Vec<Provenance>,
}

impl Resolver {
    fn take<T: Display>(&mut self, key: &'static str, over: Option<T>, default: T) -> T {
        let (value, source) = match over {
            Some(v) => (v, Source::ConfigFile),
            None => (default, Source::Default),
        };
        self.provenance.push(Provenance {
            key,
            value: value.to_string(),
            source,
        });
        value
    }

    fn record(&mut self, key: &'static str, value: String, source: Source) {
        self.provenance.push(Provenance { key, value, source });
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError(format!("{key} = {v} must be a positive finite number")))
    }
}

/// Load, merge and validate the configuration.
///
/// `file` is an optional JSON document of overrides; `flags` are the
/// command-line overrides, which win over the file.
pub fn load(file: Option<&Path>, flags: &FlagOverrides) -> Result<RunConfig> {
    let (partial, file_name) = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ConfigError(format!("cannot read {}: {e}", path.display()))
            })?;
            let parsed: PartialConfig = serde_json::from_str(&text).map_err(|e| {
                ConfigError(format!("{} is not a valid config document: {e}", path.display()))
            })?;
            (parsed, Some(path.display().to_string()))
        }
        None => (PartialConfig::default(), None),
    };
    resolve(partial, file_name, flags)
}

fn resolve(
    partial: PartialConfig,
    file_name: Option<String>,
    flags: &FlagOverrides,
) -> Result<RunConfig> {
    let defaults = ModelParams::baseline();
    let default_trend = TrendPath::baseline();
    let mut r = Resolver {
        provenance: Vec::new(),
    };
    if let Some(name) = &file_name {
        r.record("config_file", name.clone(), Source::ConfigFile);
    } else {
        r.record("config_file", "none".to_string(), Source::Default);
    }

    let p = partial.params.unwrap_or_default();
    let alpha = r.take("params.alpha", p.alpha, defaults.prefs.alpha);
    let zeta = r.take("params.zeta", p.zeta, defaults.prefs.zeta);
    let cbar = r.take("params.cbar", p.cbar, defaults.prefs.cbar);
    let phi = r.take("params.phi", p.phi, defaults.prefs.phi);
    let theta = r.take("params.theta", p.theta, defaults.tech.theta);
    let kappa = r.take("params.kappa", p.kappa, defaults.tech.kappa);
    let mu_s = r.take("params.mu_s", p.mu_s, defaults.singles.mu_s);
    let sigma_s2 = r.take("params.sigma_s2", p.sigma_s2, defaults.singles.sigma_s2);
    let mu_m = r.take("params.mu_m", p.mu_m, defaults.ar1.mu_m);
    let sigma_m2 = r.take("params.sigma_m2", p.sigma_m2, defaults.ar1.sigma_m2);
    let rho_ar = r.take("params.rho_ar", p.rho_ar, defaults.ar1.rho_ar);
    let mu_m_ct = r.take("params.mu_m_ct", p.mu_m_ct, defaults.ou.mu_m);
    let sigma_m2_ct = r.take("params.sigma_m2_ct", p.sigma_m2_ct, defaults.ou.sigma_m2);
    let eta = r.take("params.eta", p.eta, defaults.ou.eta);
    let beta_tilde = r.take("params.beta_tilde", p.beta_tilde, defaults.demo.beta_tilde);
    let delta = r.take("params.delta", p.delta, defaults.demo.delta);
    let lambda = r.take("params.lambda", p.lambda, defaults.demo.lambda);
    let dt = r.take("params.dt", p.dt, defaults.demo.dt);

    let g = partial.grid.unwrap_or_default();
    let grid_n_cfg = r.take("grid.n", g.n, 501);
    let n_std = r.take("grid.n_std", g.n_std, matchdyn::ct_model::DEFAULT_N_STD);

    let s = partial.solver.unwrap_or_default();
    let tol = r.take("solver.tol", s.tol, 1e-9);
    let max_iter = r.take("solver.max_iter", s.max_iter, matchdyn::dt_model::DEFAULT_MAX_ITER);
    let pseudo_step = r.take(
        "solver.pseudo_step",
        s.pseudo_step,
        matchdyn::ct_model::DEFAULT_PSEUDO_STEP,
    );
    let damping = r.take("solver.damping", s.damping, matchdyn::ct_model::DEFAULT_DAMPING);

    let t = partial.trend.unwrap_or_default();
    let w_1950 = r.take("trend.w_1950", t.w_1950, default_trend.w_1950);
    let dw = r.take("trend.dw", t.dw, default_trend.dw);
    let p_1950 = r.take("trend.p_1950", t.p_1950, default_trend.p_1950);
    let dp = r.take("trend.dp", t.dp, default_trend.dp);
    let year_start = r.take("trend.year_start", t.year_start, default_trend.year_start);
    let year_end = r.take("trend.year_end", t.year_end, default_trend.year_end);
    let form_text = r.take("trend.form", t.form, "geometric".to_string());
    let form = match form_text.as_str() {
        "geometric" => TrendForm::Geometric,
        "linear" => TrendForm::Linear,
        other => {
            return Err(ConfigError(format!(
                "trend.form = {other:?} must be \"geometric\" or \"linear\""
            )))
        }
    };

    let b = partial.bench.unwrap_or_default();
    let bench_n_values = match b.n_values {
        Some(v) => {
            r.record(
                "bench.n_values",
                format!("{v:?}"),
                Source::ConfigFile,
            );
            v
        }
        None => {
            let v = vec![400, 800, 1600, 3200, 6400];
            r.record("bench.n_values", format!("{v:?}"), Source::Default);
            v
        }
    };
    let bench_repeats = r.take("bench.repeats", b.repeats, 5);
    let bench_timeout_s = r.take("bench.timeout_s", b.timeout_s, 600.0);

    let output_dir_cfg = r.take("output_dir", partial.output_dir, "out".to_string());

    // Command-line flags win over the file.
    let grid_n = match flags.grid_n {
        Some(n) => {
            r.record("grid.n (effective)", n.to_string(), Source::Flag);
            n
        }
        None => grid_n_cfg,
    };
    let output_dir = match &flags.out {
        Some(dir) => {
            r.record("output_dir (effective)", dir.display().to_string(), Source::Flag);
            dir.clone()
        }
        None => PathBuf::from(output_dir_cfg),
    };

    // Domain validation, naming field and bound.
    let prefs = matchdyn::household::Preferences {
        alpha,
        zeta,
        cbar,
        phi,
    };
    let tech = matchdyn::household::HomeTechnology { theta, kappa };
    let named = |field: &'static str| move |e: matchdyn::Error| ConfigError(format!("{field}: {e}"));
    prefs.validate().map_err(named("params (preferences)"))?;
    tech.validate().map_err(named("params (home technology)"))?;
    let singles = SinglesDraw::new(mu_s, sigma_s2).map_err(named("params.sigma_s2"))?;
    let ar1 = Ar1Process::new(mu_m, sigma_m2, rho_ar).map_err(named("params (chain block)"))?;
    let ou = OuProcess::new(mu_m_ct, sigma_m2_ct, eta).map_err(named("params (diffusion block)"))?;
    let demo = Demographics::from_primitives(delta, beta_tilde, lambda, dt)
        .map_err(named("params (demographics block)"))?;

    if grid_n < 3 {
        return Err(ConfigError(format!("grid.n = {grid_n} must be at least 3")));
    }
    positive("grid.n_std", n_std)?;
    positive("solver.tol", tol)?;
    if max_iter == 0 {
        return Err(ConfigError("solver.max_iter must be at least 1".to_string()));
    }
    positive("solver.pseudo_step", pseudo_step)?;
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(ConfigError(format!(
            "solver.damping = {damping} must lie in (0, 1]"
        )));
    }
    if bench_repeats < 3 {
        return Err(ConfigError(format!(
            "bench.repeats = {bench_repeats} must be at least 3"
        )));
    }
    positive("bench.timeout_s", bench_timeout_s)?;
    if bench_n_values.len() < 4 {
        return Err(ConfigError(format!(
            "bench.n_values needs at least 4 sizes, got {}",
            bench_n_values.len()
        )));
    }
    if !bench_n_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(ConfigError(
            "bench.n_values must be strictly increasing".to_string(),
        ));
    }

    let trend = TrendPath {
        w_1950,
        dw,
        p_1950,
        dp,
        year_start,
        year_end,
        form,
    };
    trend.validate().map_err(|e| ConfigError(format!("trend: {e}")))?;

    let params = ModelParams {
        prefs,
        tech,
        singles,
        ar1,
        ou,
        demo,
        w: w_1950,
        p: p_1950,
    };
    params
        .validate()
        .map_err(|e| ConfigError(format!("params: {e}")))?;

    Ok(RunConfig {
        params,
        grid_n,
        n_std,
        tol,
        max_iter,
        pseudo_step,
        damping,
        trend,
        bench_n_values,
        bench_repeats,
        bench_timeout_s,
        output_dir,
        provenance: r.provenance,
    })
}
