use num_traits::Float;

use crate::kernels::variance;
use crate::params::{PseudoGauge, SystemParams};
use crate::quadrature::QuadratureConfig;
use crate::thermal::energy_density;
use crate::Result;

/// Mean, variance and normalized standard deviation of the smeared energy
/// density at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationResult {
    /// `ε`, units E⁴.
    pub epsilon: f64,
    /// `σ²`, units E⁸.
    pub sigma2: f64,
    /// `σ_n = √σ²/ε`.
    pub sigma_n: f64,
    pub epsilon_err: f64,
    pub sigma2_err: f64,
    /// Integrand evaluations spent on `ε` and `σ²` together.
    pub evaluations: u64,
    pub converged: bool,
}

/// Computes `ε` and `σ²` and assembles `σ_n = √σ²/ε`.
pub fn sigma_normalized(
    gauge: PseudoGauge,
    params: &SystemParams,
    cfg: &QuadratureConfig,
) -> Result<FluctuationResult> {
    let sigma2 = variance(gauge, params, cfg)?;
    let epsilon = energy_density(params, cfg)?;
    Ok(FluctuationResult {
        epsilon: epsilon.value,
        sigma2: sigma2.value,
        sigma_n: sigma2.value.sqrt() / epsilon.value,
        epsilon_err: epsilon.error,
        sigma2_err: sigma2.error,
        evaluations: epsilon.evaluations + sigma2.evaluations,
        converged: epsilon.converged && sigma2.converged,
    })
}
