//! The `vrsmooth` command line: `functionals`, `coverage-table`, `fit` and
//! `simulate`.
//!
//! Every command renders its output into a string first, so the bytes written
//! depend only on the flags (and seed), never on thread count or timing.
//! Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::bandwidth::{adjust_h, gamma_a, gamma_q, h0_global};
use crate::combine::{CombinerSpec, Variant, OPTIMAL_SHIFT};
use crate::error::{Error, Result};
use crate::inference::interval;
use crate::kernels::{c_delta, d_delta, nu_tilde, Kernel, KernelId};
use crate::scenario::{Design, Regression, Scenario};
use crate::sim::{run_study, SimConfig};
use crate::smoother::{Dataset, SmootherConfig};
use crate::vr::estimate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable that overrides the seed in a simulation config.
pub const SEED_ENV: &str = "VRSMOOTH_SEED";

#[derive(Debug, Parser)]
#[command(name = "vrsmooth", version, about = "Variance-reduced local linear regression")]
pub struct Cli {
    /// Worker threads for simulations (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write output here instead of stdout; a `.manifest.json` sidecar is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel functionals and efficiencies over a grid of bin widths.
    Functionals(FunctionalsArgs),
    /// Ratios of optimal one-sided coverage errors, kernel by beta rows and delta columns.
    CoverageTable(CoverageTableArgs),
    /// Fit a curve to a two-column `x,y` CSV file.
    Fit(FitArgs),
    /// Run a Monte Carlo study described by a JSON config.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct FunctionalsArgs {
    #[arg(long, default_value = "epanechnikov")]
    pub kernel: KernelId,
    /// Comma separated bin widths.
    #[arg(long, value_delimiter = ',', default_values_t = default_delta_grid())]
    pub delta: Vec<f64>,
    /// Shift used for the nu_tilde02 column.
    #[arg(long, default_value_t = OPTIMAL_SHIFT, allow_negative_numbers = true)]
    pub r: f64,
}

fn default_delta_grid() -> Vec<f64> {
    (0..=40).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Args)]
pub struct CoverageTableArgs {
    /// Kernels to tabulate (default: all three).
    #[arg(long, value_delimiter = ',')]
    pub kernel: Vec<KernelId>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.95, 0.9, 0.85, 0.8])]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.6, 0.8, 1.0, 1.2, 1.6, 2.0])]
    pub delta: Vec<f64>,
    #[arg(long, default_value_t = OPTIMAL_SHIFT, allow_negative_numbers = true)]
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Ll,
    Q,
    Plus,
    Minus,
    Avg,
}

impl VariantArg {
    pub fn resolve(self, r: Option<f64>) -> Result<Variant> {
        match (self, r) {
            (VariantArg::Q, Some(r)) => Ok(Variant::Q { r }),
            (VariantArg::Q, None) => Err(Error::Config("--variant q needs --r".into())),
            (_, Some(_)) => Err(Error::Config("--r only applies to --variant q".into())),
            (VariantArg::Ll, None) => Ok(Variant::LocalLinear),
            (VariantArg::Plus, None) => Ok(Variant::Plus),
            (VariantArg::Minus, None) => Ok(Variant::Minus),
            (VariantArg::Avg, None) => Ok(Variant::Average),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Headerless `x,y` CSV with x already scaled to [0, 1].
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "epanechnikov")]
    pub kernel: KernelId,
    /// Bandwidth, or `auto` for the oracle rule (needs --oracle).
    #[arg(long)]
    pub h: String,
    /// Regression curve whose curvature drives `--h auto`.
    #[arg(long, requires = "noise_level")]
    pub oracle: Option<Regression>,
    /// Noise multiplier of the oracle scenario.
    #[arg(long)]
    pub noise_level: Option<f64>,
    #[arg(long, value_enum, default_value = "avg")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub grid_size: usize,
    /// Add a lower confidence bound column at this level.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Use the ridged local linear denominator.
    #[arg(long)]
    pub ridge: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON study config.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides both the config seed and the environment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the full JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Config(_) | Error::Io(_) | Error::Parse(_) => EXIT_USAGE,
        Error::SingularDesign { .. }
        | Error::EmptyWindow { .. }
        | Error::DegenerateCurvature
        | Error::SingularRatio(_)
        | Error::Consistency(_) => EXIT_NUMERIC,
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            if t == 0 {
                return Err(Error::Config("--threads must be positive".into()));
            }
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?
    };
    pool.install(|| {
        let (name, text, config) = match &cli.command {
            Command::Functionals(a) => {
                let k = Kernel::from(a.kernel);
                let cfg = serde_json::json!({ "kernel": a.kernel, "delta": a.delta, "r": a.r });
                ("functionals", functionals_csv(&k, &a.delta, a.r)?, cfg)
            }
            Command::CoverageTable(a) => {
                let kernels = if a.kernel.is_empty() { KernelId::ALL.to_vec() } else { a.kernel.clone() };
                let cfg = serde_json::json!({ "kernel": kernels, "beta": a.beta, "delta": a.delta, "r": a.r });
                ("coverage-table", coverage_table_csv(&kernels, &a.beta, &a.delta, a.r)?, cfg)
            }
            Command::Fit(a) => {
                let (text, warnings) = fit_csv(a)?;
                if warnings > 0 {
                    eprintln!("warning: {warnings} grid points could not be estimated (NA)");
                }
                ("fit", text, serde_json::to_value(a).expect("fit args serialize"))
            }
            Command::Simulate(a) => {
                let cfg = load_sim_config(&a.config, a.seed, std::env::var(SEED_ENV).ok().as_deref())?;
                let report = run_study(&cfg)?;
                if let Some(path) = &a.report {
                    let json = serde_json::to_string_pretty(&report).expect("report serializes");
                    write_file(path, &(json + "\n"))?;
                }
                ("simulate", report.to_csv(), serde_json::to_value(&cfg).expect("config serializes"))
            }
        };
        match &cli.out {
            None => {
                print!("{text}");
                Ok(())
            }
            Some(path) => {
                write_file(path, &text)?;
                let seed = config.get("seed").and_then(Value::as_u64);
                let manifest = RunManifest::new(name, config, seed);
                write_file(&manifest_path(path), &(manifest.to_json() + "\n"))
            }
        }
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Sidecar written next to an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` wins when set.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, seed: Option<u64>) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        RunManifest {
            command: command.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// `out.csv` -> `out.csv.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Columns `delta,C,D,nu_tilde02,gamma_q,gamma_a`.
pub fn functionals_csv(k: &Kernel, deltas: &[f64], r: f64) -> Result<String> {
    let mut out = String::from("delta,C,D,nu_tilde02,gamma_q,gamma_a\n");
    for &d in deltas {
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::Domain(format!("delta must be finite and >= 0, got {d}")));
        }
        let nt = nu_tilde(k, 2, r, d)?;
        writeln!(out, "{},{},{},{},{},{}", d, c_delta(k, d), d_delta(k, d), nt, gamma_q(k, d), gamma_a(k, d))
            .unwrap();
    }
    Ok(out)
}

/// One row per (kernel, beta), one column per delta.
pub fn coverage_table_csv(kernels: &[KernelId], betas: &[f64], deltas: &[f64], r: f64) -> Result<String> {
    for &b in betas {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 1), got {b}")));
        }
    }
    let mut out = String::from("kernel,beta");
    for d in deltas {
        write!(out, ",delta_{d}").unwrap();
    }
    out.push('\n');
    for &id in kernels {
        let k = Kernel::from(id);
        for &b in betas {
            write!(out, "{id},{b}").unwrap();
            for &d in deltas {
                write!(out, ",{}", crate::inference::coverage_ratio(&k, d, r, b)?).unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Parse a headerless two-column CSV. Blank lines are skipped.
pub fn parse_xy(text: &str) -> Result<Dataset> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (x, y) = match (fields.next(), fields.next(), fields.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => return Err(Error::Parse(format!("line {}: expected two fields", i + 1))),
        };
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: '{s}' is not a number", i + 1)))
        };
        xs.push(parse(x)?);
        ys.push(parse(y)?);
    }
    if xs.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Dataset::new(xs, ys).map_err(|e| Error::Parse(e.to_string()))
}

/// Columns `x,estimate,effective_delta[,lower_cb]`; failed points are `NA`.
/// Returns the text and the number of failed points.
pub fn fit_csv(a: &FitArgs) -> Result<(String, usize)> {
    let text = std::fs::read_to_string(&a.data).map_err(|e| Error::Io(format!("{}: {e}", a.data.display())))?;
    let data = parse_xy(&text)?;
    let kernel = Kernel::from(a.kernel);
    let variant = a.variant.resolve(a.r)?;
    let delta = if variant == Variant::LocalLinear { 0.0 } else { a.delta };
    let spec = CombinerSpec::new(variant, delta)?;
    if a.grid_size < 2 {
        return Err(Error::Config("--grid-size must be at least 2".into()));
    }
    let h = if a.h == "auto" {
        let (Some(reg), Some(k)) = (a.oracle, a.noise_level) else {
            return Err(Error::Config("--h auto needs --oracle and --noise-level".into()));
        };
        let sc = Scenario::new(reg, Design::Uniform01, k)?;
        let h0 = h0_global(sc.sigma().powi(2), data.len(), &kernel, sc.curvature_sq_integral(), 1.0)?;
        if variant == Variant::LocalLinear {
            h0
        } else {
            adjust_h(h0, &kernel, delta, variant)?
        }
    } else {
        a.h.parse::<f64>().map_err(|_| Error::Config(format!("--h must be a number or 'auto', got '{}'", a.h)))?
    };
    let cfg = SmootherConfig::new(kernel, h, a.ridge)?;
    if let Some(b) = a.beta {
        crate::inference::z_beta(b)?;
    }

    let mut out = String::from("x,estimate,effective_delta");
    if a.beta.is_some() {
        out.push_str(",lower_cb");
    }
    out.push('\n');
    let mut failed = 0;
    let step = 1.0 / (a.grid_size - 1) as f64;
    for i in 0..a.grid_size {
        let x = if i == a.grid_size - 1 { 1.0 } else { i as f64 * step };
        match estimate(&data, &cfg, x, &spec) {
            Ok(e) => write!(out, "{x},{},{}", e.value, e.effective_delta).unwrap(),
            Err(_) => {
                failed += 1;
                write!(out, "{x},NA,NA").unwrap();
            }
        }
        if let Some(b) = a.beta {
            match interval(&data, &cfg, x, b, variant, delta) {
                Ok(iv) => write!(out, ",{}", iv.lower).unwrap(),
                Err(_) => out.push_str(",NA"),
            }
        }
        out.push('\n');
    }
    Ok((out, failed))
}

const SIM_KEYS: [&str; 10] = [
    "scenario",
    "n",
    "replications",
    "bandwidths",
    "estimators",
    "kernel",
    "grid_size",
    "seed",
    "ridge",
    "baseline",
];
const SCENARIO_KEYS: [&str; 3] = ["regression", "design", "noise_level"];
const ESTIMATOR_KEYS: [&str; 3] = ["variant", "delta", "r"];

fn unknown_keys(v: &Value, allowed: &[&str], prefix: &str, into: &mut Vec<String>) {
    if let Some(obj) = v.as_object() {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                into.push(format!("{prefix}{k}"));
            }
        }
    }
}

/// Parse and validate a simulation config. Seed precedence: `flag_seed`,
/// then `env_seed`, then the file.
pub fn parse_sim_config(text: &str, flag_seed: Option<u64>, env_seed: Option<&str>) -> Result<SimConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    if !v.is_object() {
        return Err(Error::Config("config must be a JSON object".into()));
    }
    let mut bad = Vec::new();
    unknown_keys(&v, &SIM_KEYS, "", &mut bad);
    if let Some(s) = v.get("scenario") {
        unknown_keys(s, &SCENARIO_KEYS, "scenario.", &mut bad);
    }
    if let Some(Value::Array(es)) = v.get("estimators") {
        for (i, e) in es.iter().enumerate() {
            unknown_keys(e, &ESTIMATOR_KEYS, &format!("estimators[{i}]."), &mut bad);
        }
    }
    if !bad.is_empty() {
        return Err(Error::Config(format!("unknown config keys: {}", bad.join(", "))));
    }
    let mut cfg: SimConfig = serde_json::from_value(v).map_err(|e| Error::Config(format!("config: {e}")))?;
    if let Some(s) = env_seed {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got '{s}'")))?;
    }
    if let Some(s) = flag_seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_sim_config(path: &Path, flag_seed: Option<u64>, env_seed: Option<&str>) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sim_config(&text, flag_seed, env_seed)
}
