//! Argument parsing and the four subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pgfluct_core::{sigma_normalized, AngularMode, PseudoGauge, QuadratureConfig, SystemParams};
use serde::Serialize;

use crate::checks::{CheckOutcome, CheckSuite};
use crate::plot::{self, PlotSpec};
use crate::record::{self, RunRecord, TOOL_VERSION};
use crate::sweep::{self, Spacing, SweepSpec, SweptParameter};
use crate::{flag_error, exit};

/// Energy-density fluctuations of a hot Dirac gas under four pseudo-gauges.
///
/// All inputs are in natural units (ħ = c = k_B = 1) and share one energy
/// unit: mass and temperature are energies, the smearing radius is an
/// inverse energy.
#[derive(Debug, Parser)]
#[command(name = "pgfluct", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate epsilon, sigma2 and sigma_n at one point.
    Compute(ComputeArgs),
    /// Evaluate a one-parameter sweep and write CSV.
    Sweep(SweepArgs),
    /// Run the built-in invariant and oracle checks.
    Check(CheckArgs),
    /// Draw a sweep CSV as an SVG line plot.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Angular {
    Numeric,
    Analytic,
}

impl From<Angular> for AngularMode {
    fn from(a: Angular) -> Self {
        match a {
            Angular::Numeric => AngularMode::Numeric,
            Angular::Analytic => AngularMode::AnalyticMoments,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_gauge(s: &str) -> Result<PseudoGauge, String> {
    PseudoGauge::from_str(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Pseudo-gauge: can, br, glw or hw.
    #[arg(long, value_parser = parse_gauge)]
    pub gauge: PseudoGauge,
    /// Particle mass m.
    #[arg(long, allow_negative_numbers = true)]
    pub mass: f64,
    /// Temperature T.
    #[arg(long, allow_negative_numbers = true)]
    pub temp: f64,
    /// Gaussian smearing radius a.
    #[arg(long, allow_negative_numbers = true)]
    pub radius: f64,
    /// Relative tolerance of every integral.
    #[arg(long, default_value_t = 1e-6, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = pgfluct_core::DEFAULT_DEGENERACY, allow_negative_numbers = true)]
    pub degeneracy: f64,
    #[arg(long, value_enum, default_value_t = Angular::Analytic)]
    pub angular: Angular,
    /// Integrand evaluation budget per integral.
    #[arg(long, default_value_t = QuadratureConfig::default().max_evals)]
    pub max_evals: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// key = value file with defaults for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Swept parameter: radius_a, mass or temperature.
    #[arg(long)]
    pub param: Option<SweptParameter>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Number of points, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    /// linear or log [default: linear].
    #[arg(long)]
    pub spacing: Option<Spacing>,
    /// Comma-separated gauges in output order [default: can,br,glw,hw].
    #[arg(long)]
    pub gauges: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub temp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub degeneracy: Option<f64>,
    /// numeric or analytic.
    #[arg(long)]
    pub angular: Option<String>,
    #[arg(long)]
    pub max_evals: Option<u64>,
    /// Worker threads [default: all cores].
    #[arg(long, env = "PGFLUCT_JOBS")]
    pub jobs: Option<usize>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Reduced grid and lattice boxes up to L = 8/T; a few seconds.
    #[arg(long)]
    pub quick: bool,
    /// Cross-mode grid as `m/T list : aT list`, e.g. `0.5,1,5:0.5,1,2,5,10`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Also write the results as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, env = "PGFLUCT_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Sweep CSV to read.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "a")]
    pub x: String,
    #[arg(long, default_value = "sigma_n")]
    pub y: String,
    /// Column that splits rows into curves.
    #[arg(long)]
    pub series: Option<String>,
    #[arg(long)]
    pub log_x: bool,
    #[arg(long)]
    pub log_y: bool,
    /// SVG output path.
    #[arg(long)]
    pub output: PathBuf,
    /// Data sidecar path [default: the SVG path with a .data.csv extension].
    #[arg(long)]
    pub data: Option<PathBuf>,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::INVALID_INPUT } else { exit::OK };
        }
    };
    let outcome = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Check(a) => check(a),
        Command::Plot(a) => plot_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::INVALID_INPUT
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn config(tol: f64, angular: Angular, max_evals: u64) -> anyhow::Result<QuadratureConfig> {
    let cfg = QuadratureConfig {
        max_evals,
        ..QuadratureConfig::default()
            .with_rel_tol(tol)
            .with_angular_mode(angular.into())
    };
    cfg.validate().map_err(flag_error)?;
    Ok(cfg)
}

fn warn_small_mass(params: &SystemParams, gauge: PseudoGauge) {
    if params.small_mass_warning(gauge) {
        eprintln!(
            "warning: m/T = {:e} is tiny; the {gauge} variance grows like 1/m²",
            params.mass_ratio()
        );
    }
}

fn compute(a: ComputeArgs) -> anyhow::Result<i32> {
    let params = SystemParams::new(a.mass, a.temp, a.radius)
        .and_then(|p| p.with_degeneracy(a.degeneracy))
        .map_err(flag_error)?;
    let cfg = config(a.tol, a.angular, a.max_evals)?;
    params.check_gauge(a.gauge)?;
    warn_small_mass(&params, a.gauge);

    let result = sigma_normalized(a.gauge, &params, &cfg)?;
    let rec = RunRecord::new(params, a.gauge, result, &cfg);
    let stdout = io::stdout();
    match a.format {
        Format::Json => writeln!(stdout.lock(), "{}", rec.to_json())?,
        Format::Csv => record::write_csv(stdout.lock(), std::slice::from_ref(&rec))?,
    }
    if !result.converged {
        eprintln!("warning: the requested tolerance was not reached");
        return Ok(exit::NOT_CONVERGED);
    }
    Ok(exit::OK)
}

/// Flag value if given, else the config file entry, else `default`.
fn pick<T: FromStr>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
    default: Option<T>,
) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(text) = file.get(key) {
        return text
            .parse()
            .map_err(|e| anyhow!("invalid value `{text}` for `{key}` in config file: {e}"));
    }
    default.ok_or_else(|| anyhow!("missing required flag --{key}"))
}

fn parse_gauge_list(text: &str) -> anyhow::Result<Vec<PseudoGauge>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_gauge(s).map_err(|e| anyhow!("invalid value `{s}` for --gauges: {e}")))
        .collect()
}

fn sweep_cmd(a: SweepArgs) -> anyhow::Result<i32> {
    let file = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            sweep::parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => BTreeMap::new(),
    };
    let swept = pick(a.param, &file, "param", None)?;
    let spacing = pick(a.spacing, &file, "spacing", Some(Spacing::Linear))?;
    let gauges = match a.gauges.as_deref().or(file.get("gauges").map(String::as_str)) {
        Some(text) => parse_gauge_list(text)?,
        None => PseudoGauge::ALL.to_vec(),
    };
    // The swept slot does not need a value.
    let fixed = |flag: Option<f64>, key: &str, slot: SweptParameter| {
        pick(flag, &file, key, if swept == slot { Some(f64::NAN) } else { None })
    };
    let spec = SweepSpec {
        swept,
        from: pick(a.from, &file, "from", None)?,
        to: pick(a.to, &file, "to", None)?,
        points: pick(a.points, &file, "points", None)?,
        spacing,
        gauges,
        mass: fixed(a.mass, "mass", SweptParameter::Mass)?,
        temperature: fixed(a.temp, "temp", SweptParameter::Temperature)?,
        radius_a: fixed(a.radius, "radius", SweptParameter::RadiusA)?,
        degeneracy: pick(a.degeneracy, &file, "degeneracy", Some(pgfluct_core::DEFAULT_DEGENERACY))?,
    };
    let tol = pick(a.tol, &file, "tol", Some(1e-6))?;
    let angular = match a.angular.as_deref().or(file.get("angular").map(String::as_str)) {
        Some(text) => Angular::from_str(text, true).map_err(|_| anyhow!("invalid value `{text}` for --angular: expected numeric or analytic"))?,
        None => Angular::Analytic,
    };
    let jobs = pick(a.jobs, &file, "jobs", Some(default_jobs()))?;
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let output: Option<PathBuf> = a.output.or_else(|| file.get("output").map(PathBuf::from));
    let max_evals = pick(a.max_evals, &file, "max-evals", Some(QuadratureConfig::default().max_evals))?;
    let cfg = config(tol, angular, max_evals)?;
    spec.validate()?;
    for x in spec.values() {
        let p = spec.params_at(x)?;
        for &g in &spec.gauges {
            warn_small_mass(&p, g);
        }
    }

    let records = sweep::run(&spec, &cfg, jobs)?;
    match &output {
        Some(path) => {
            let mut buf = Vec::new();
            record::write_csv(&mut buf, &records)?;
            fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
        }
        None => record::write_csv(io::stdout().lock(), &records)?,
    }
    let failed = records.iter().filter(|r| !r.result.converged).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} rows did not converge", records.len());
        return Ok(exit::NOT_CONVERGED);
    }
    Ok(exit::OK)
}

fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let v: f64 = s.trim().parse().map_err(|_| anyhow!("invalid number `{s}` in --grid"))?;
            if !(v > 0.0 && v.is_finite()) {
                bail!("--grid values must be positive, got {v}");
            }
            Ok(v)
        })
        .collect()
}

#[derive(Serialize)]
struct Report<'a> {
    tool_version: &'a str,
    quick: bool,
    passed: bool,
    checks: &'a [CheckOutcome],
}

fn check(a: CheckArgs) -> anyhow::Result<i32> {
    let mut suite = if a.quick { CheckSuite::quick() } else { CheckSuite::standard() };
    if let Some(grid) = &a.grid {
        let (m, r) = grid
            .split_once(':')
            .ok_or_else(|| anyhow!("--grid expects `m/T list : aT list`, got `{grid}`"))?;
        suite.mass_ratios = parse_list(m)?;
        suite.radius_ratios = parse_list(r)?;
    }
    let jobs = a.jobs.unwrap_or_else(default_jobs);
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;

    let stdout = io::stdout();
    let outcomes: Vec<CheckOutcome> = pool.install(|| suite.run());
    let mut out = stdout.lock();
    for o in &outcomes {
        writeln!(out, "{}", o.line())?;
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(
        out,
        "{}: {} of {} checks passed",
        if passed { "ok" } else { "FAILED" },
        outcomes.len() - failed,
        outcomes.len()
    )?;
    if let Some(path) = &a.report {
        let report = Report {
            tool_version: TOOL_VERSION,
            quick: a.quick,
            passed,
            checks: &outcomes,
        };
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if passed { exit::OK } else { exit::CHECK_FAILED })
}

fn sidecar_path(svg: &Path) -> PathBuf {
    svg.with_extension("data.csv")
}

fn plot_cmd(a: PlotArgs) -> anyhow::Result<i32> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let spec = PlotSpec {
        x: a.x,
        y: a.y,
        series: a.series,
        log_x: a.log_x,
        log_y: a.log_y,
    };
    let data = plot::read(&text, &spec).with_context(|| format!("in {}", a.input.display()))?;
    let data_path = a.data.unwrap_or_else(|| sidecar_path(&a.output));
    if data_path == a.output || data_path == a.input {
        bail!("--data must differ from --output and --input");
    }
    let svg = plot::svg(&data, &spec);
    let side = plot::sidecar(&data)?;
    fs::write(&a.output, svg).with_context(|| format!("writing {}", a.output.display()))?;
    fs::write(&data_path, side).with_context(|| format!("writing {}", data_path.display()))?;
    Ok(exit::OK)
}
