//! Parameter sweeps over one of `a`, `m` or `T`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};
use pgfluct_core::{sigma_normalized, FluctuationResult, PseudoGauge, QuadratureConfig, SystemParams};
use rayon::prelude::*;

use crate::record::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    RadiusA,
    Mass,
    Temperature,
}

impl FromStr for SweptParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "radius_a" | "radius" | "a" => Ok(SweptParameter::RadiusA),
            "mass" | "m" => Ok(SweptParameter::Mass),
            "temperature" | "temp" | "T" => Ok(SweptParameter::Temperature),
            other => Err(format!("unknown parameter `{other}`, expected radius_a, mass or temperature")),
        }
    }
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweptParameter::RadiusA => "radius_a",
            SweptParameter::Mass => "mass",
            SweptParameter::Temperature => "temperature",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(format!("unknown spacing `{other}`, expected linear or log")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub swept: SweptParameter,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub gauges: Vec<PseudoGauge>,
    /// Values of the parameters that are not swept; the swept slot is
    /// ignored.
    pub mass: f64,
    pub temperature: f64,
    pub radius_a: f64,
    pub degeneracy: f64,
}

impl SweepSpec {
    /// Checks the sweep and every parameter point it generates, so invalid
    /// input is reported before any integral is started.
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            bail!("--from and --to must be finite");
        }
        if self.spacing == Spacing::Log && self.from <= 0.0 {
            bail!("--from must be positive for log spacing, got {}", self.from);
        }
        if self.from >= self.to {
            bail!("--from ({}) must be smaller than --to ({})", self.from, self.to);
        }
        if self.points < 2 {
            bail!("--points must be at least 2, got {}", self.points);
        }
        if self.gauges.is_empty() {
            bail!("--gauges must select at least one gauge");
        }
        for x in self.values() {
            let p = self.params_at(x).with_context(|| format!("at {} = {x}", self.swept))?;
            for &g in &self.gauges {
                p.check_gauge(g)?;
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.to;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.from + t * (self.to - self.from),
                    Spacing::Log => (self.from.ln() + t * (self.to / self.from).ln()).exp(),
                }
            })
            .collect()
    }

    pub fn params_at(&self, x: f64) -> anyhow::Result<SystemParams> {
        let (m, t, a) = match self.swept {
            SweptParameter::RadiusA => (self.mass, self.temperature, x),
            SweptParameter::Mass => (x, self.temperature, self.radius_a),
            SweptParameter::Temperature => (self.mass, x, self.radius_a),
        };
        let p = SystemParams::new(m, t, a).map_err(crate::flag_error)?;
        p.with_degeneracy(self.degeneracy).map_err(crate::flag_error)
    }
}

/// Flat `key = value` file; `#` starts a comment. Keys mirror the long flag
/// names of `sweep`.
pub fn parse_config(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    const KEYS: [&str; 15] = [
        "param", "from", "to", "points", "spacing", "gauges", "mass", "temp", "radius", "tol",
        "degeneracy", "angular", "max-evals", "jobs", "output",
    ];
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got `{line}`", i + 1);
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let key = if key == "radius-a" { "radius".to_string() } else { key };
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key `{key}`", i + 1);
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("config line {}: duplicate key `{key}`", i + 1);
        }
    }
    Ok(map)
}

/// Evaluates every `(point, gauge)` pair on a pool of `jobs` threads and
/// returns the records in point order, then gauge order as given.
///
/// Each task is single-threaded, so the numbers do not depend on `jobs`.
/// A point whose evaluation fails outright is recorded as NaN with
/// `converged = false`.
pub fn run(spec: &SweepSpec, cfg: &QuadratureConfig, jobs: usize) -> anyhow::Result<Vec<RunRecord>> {
    let tasks: Vec<(SystemParams, PseudoGauge)> = spec
        .values()
        .into_iter()
        .map(|x| spec.params_at(x))
        .collect::<anyhow::Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|p| spec.gauges.iter().map(move |&g| (p, g)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building the worker pool")?;
    let records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, g)| {
                let result = sigma_normalized(g, &p, cfg).unwrap_or(FluctuationResult {
                    epsilon: f64::NAN,
                    sigma2: f64::NAN,
                    sigma_n: f64::NAN,
                    epsilon_err: f64::NAN,
                    sigma2_err: f64::NAN,
                    evaluations: 0,
                    converged: false,
                });
                RunRecord::new(p, g, result, cfg)
            })
            .collect()
    });
    Ok(records)
}
