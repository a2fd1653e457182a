//! Kinematics, Fermi-Dirac occupation and the thermal energy density.

use core::f64::consts::PI;

use num_traits::Float;

use crate::params::SystemParams;
use crate::quadrature::{integrate_radial, Estimate, QuadratureConfig};
use crate::Result;

/// Fermi-Dirac occupation `1/(e^{ω/T} + 1)` for `ω ≥ 0`, `T > 0`.
///
/// Evaluated as `t/(1 + t)` with `t = e^{−ω/T}`, which cannot overflow and
/// underflows to exactly `0.0` once `ω/T` exceeds the double range (~745).
#[inline]
pub fn fermi_dirac(omega: f64, temperature: f64) -> f64 {
    let t = (-omega / temperature).exp();
    t / (1.0 + t)
}

/// `1 − f(ω)`, computed without cancellation.
#[inline]
pub fn fermi_dirac_complement(omega: f64, temperature: f64) -> f64 {
    1.0 / (1.0 + (-omega / temperature).exp())
}

/// `ω = √(k² + m²)`; returns `k` exactly when `m = 0`.
#[inline]
pub fn on_shell_energy(k: f64, mass: f64) -> f64 {
    if mass == 0.0 {
        k
    } else {
        k.hypot(mass)
    }
}

/// Thermal energy density `ε = g/(2π²) ∫₀^∞ k² ω f(ω) dk`.
///
/// The same for all four energy-momentum tensors and independent of the
/// smearing radius. The integral is done in units of `T` and scaled by
/// `T⁴`. A non-converged quadrature is reported through
/// [`Estimate::converged`]; the only error is an invalid `cfg`.
pub fn energy_density(params: &SystemParams, cfg: &QuadratureConfig) -> Result<Estimate> {
    cfg.validate()?;
    let mu = params.mass_ratio();
    let norm = params.degeneracy() / (2.0 * PI * PI);
    let est = integrate_radial(
        |x| {
            let w = on_shell_energy(x, mu);
            x * x * w * fermi_dirac(w, 1.0)
        },
        1.0,
        cfg,
    );
    Ok(est.scaled(norm * params.temperature().powi(4)))
}
