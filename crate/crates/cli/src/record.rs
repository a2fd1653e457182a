//! Output records and their JSON / CSV encodings.

use std::io::Write;

use pgfluct_core::{AngularMode, FluctuationResult, PseudoGauge, QuadratureConfig, SystemParams};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Version of the CSV column layout, written into every row.
pub const CSV_SCHEMA: u32 = 1;

pub const CSV_HEADER: [&str; 10] = [
    "schema", "a", "m", "T", "gauge", "epsilon", "sigma2", "sigma_n", "sigma2_err", "converged",
];

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One evaluated parameter point with what is needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub params: SystemParams,
    pub gauge: PseudoGauge,
    pub result: FluctuationResult,
    pub config_digest: String,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunRecord {
    pub fn new(params: SystemParams, gauge: PseudoGauge, result: FluctuationResult, cfg: &QuadratureConfig) -> Self {
        RunRecord {
            params,
            gauge,
            result,
            config_digest: config_digest(cfg),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        let flat = JsonRecord {
            gauge: self.gauge.tag(),
            mass: self.params.mass(),
            temperature: self.params.temperature(),
            radius_a: self.params.radius_a(),
            degeneracy: self.params.degeneracy(),
            epsilon: self.result.epsilon,
            sigma2: self.result.sigma2,
            sigma_n: self.result.sigma_n,
            epsilon_err: self.result.epsilon_err,
            sigma2_err: self.result.sigma2_err,
            evaluations: self.result.evaluations,
            converged: self.result.converged,
            config_digest: &self.config_digest,
            tool_version: &self.tool_version,
            timestamp: &self.timestamp,
        };
        serde_json::to_string(&flat).expect("flat record always serializes")
    }

    /// Fields in [`CSV_HEADER`] order.
    pub fn csv_fields(&self) -> [String; 10] {
        [
            CSV_SCHEMA.to_string(),
            number(self.params.radius_a()),
            number(self.params.mass()),
            number(self.params.temperature()),
            self.gauge.tag().to_string(),
            number(self.result.epsilon),
            number(self.result.sigma2),
            number(self.result.sigma_n),
            number(self.result.sigma2_err),
            self.result.converged.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    gauge: &'a str,
    mass: f64,
    temperature: f64,
    radius_a: f64,
    degeneracy: f64,
    epsilon: f64,
    sigma2: f64,
    sigma_n: f64,
    epsilon_err: f64,
    sigma2_err: f64,
    evaluations: u64,
    converged: bool,
    config_digest: &'a str,
    tool_version: &'a str,
    timestamp: &'a str,
}

/// Shortest round-tripping decimal; scientific notation outside
/// `[1e-4, 1e7)` so tiny variances do not print hundreds of zeros.
pub fn number(x: f64) -> String {
    let mag = x.abs();
    if x == 0.0 || (1e-4..1e7).contains(&mag) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// SHA-256 over a canonical rendering of every configuration field. Floats
/// are hashed by their bit patterns so the digest never depends on
/// formatting.
pub fn config_digest(cfg: &QuadratureConfig) -> String {
    let mode = match cfg.angular_mode {
        AngularMode::Numeric => "numeric",
        AngularMode::AnalyticMoments => "analytic",
    };
    let canonical = format!(
        "rel_tol={:016x};abs_tol={:016x};max_evals={};cutoff_multiplier={:016x};band_sigmas={:016x};angular_mode={}",
        cfg.rel_tol.to_bits(),
        cfg.abs_tol.to_bits(),
        cfg.max_evals,
        cfg.cutoff_multiplier.to_bits(),
        cfg.band_sigmas.to_bits(),
        mode,
    );
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in records {
        writer.write_record(r.csv_fields())?;
    }
    writer.flush()?;
    Ok(())
}
