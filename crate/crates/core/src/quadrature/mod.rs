//! Deterministic numerical integration.
//!
//! All integrators are single-threaded and use a fixed worklist discipline
//! (largest error first, ties broken by creation order), so identical inputs
//! give bitwise-identical outputs.

mod gk;
mod moments;
mod variance3d;

pub use gk::{adaptive, gauss_kronrod_21, Panel, Tolerance};
pub use moments::{angular_moments_scaled, SERIES_SWITCH};
pub use variance3d::{integrate_variance_3d, AngularIntegrand, AngularSlice, Domain3};

use crate::error::Error;
use crate::Result;

/// How the angular (`u = cos θ`) integral is done in the variance integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngularMode {
    /// Adaptive Gauss-Kronrod over `u`.
    Numeric,
    /// Closed-form exponential moments of the polynomial weights.
    AnalyticMoments,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance, in `(1e-14, 1e-2)`.
    pub rel_tol: f64,
    /// Absolute floor on the error target, in thermal units (`T = 1`).
    pub abs_tol: f64,
    /// Budget of integrand evaluations (innermost calls) per integral.
    pub max_evals: u64,
    /// Radial cutoff is `k_max = (cutoff_multiplier + 30)·T`.
    pub cutoff_multiplier: f64,
    /// Half-width of the diagonal band `|k − k′| ≤ band_sigmas/a` kept in the
    /// variance integrals.
    pub band_sigmas: f64,
    pub angular_mode: AngularMode,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-300,
            max_evals: 400_000_000,
            cutoff_multiplier: 20.0,
            band_sigmas: 9.0,
            angular_mode: AngularMode::AnalyticMoments,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_angular_mode(mut self, mode: AngularMode) -> Self {
        self.angular_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 1e-14 && self.rel_tol < 1e-2) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
                reason: "must lie in (1e-14, 1e-2)",
            });
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: self.abs_tol,
                reason: "must be finite and non-negative",
            });
        }
        if self.max_evals < 10_000 {
            return Err(Error::InvalidParameter {
                name: "max_evals",
                value: self.max_evals as f64,
                reason: "must be at least 10^4",
            });
        }
        // f(ω) ≤ e^{-k/T}: the smallest allowed cutoff, 32.3·T, puts the
        // occupation at the cutoff below 1e-14.
        if !(self.cutoff_multiplier.is_finite() && self.cutoff_multiplier >= 2.3) {
            return Err(Error::InvalidParameter {
                name: "cutoff_multiplier",
                value: self.cutoff_multiplier,
                reason: "must be at least 2.3 so that f(k_max) < 1e-14",
            });
        }
        if !(self.band_sigmas.is_finite() && self.band_sigmas >= 6.0) {
            return Err(Error::InvalidParameter {
                name: "band_sigmas",
                value: self.band_sigmas,
                reason: "must be at least 6",
            });
        }
        Ok(())
    }

    /// Radial cutoff for a thermal scale `temperature`.
    pub fn k_max(&self, temperature: f64) -> f64 {
        (self.cutoff_multiplier + 30.0) * temperature
    }

    pub(crate) fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
        }
    }
}

/// Result of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations.
    pub evaluations: u64,
    pub converged: bool,
}

impl Estimate {
    pub(crate) fn scaled(self, factor: f64) -> Estimate {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
            ..self
        }
    }

    /// Turns a non-converged estimate into [`Error::NonConvergence`].
    pub fn require_converged(self) -> Result<Estimate> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                value: self.value,
                error: self.error,
                evaluations: self.evaluations,
            })
        }
    }
}

/// Integrates `integrand` over `[0, ∞)`, truncated at `cfg.k_max(scale)`.
///
/// `scale` is the decay scale of the integrand (the temperature for thermal
/// integrals). The discarded tail is estimated with one Gauss-Kronrod block
/// on `[k_max, 2 k_max]`; if it exceeds `rel_tol/10` of the result the
/// estimate is reported as not converged.
pub fn integrate_radial<F>(mut integrand: F, scale: f64, cfg: &QuadratureConfig) -> Estimate
where
    F: FnMut(f64) -> f64,
{
    let k_max = cfg.k_max(scale);
    let mut breaks = alloc::vec![0.0];
    let mut edge = scale;
    while edge < k_max {
        breaks.push(edge);
        edge *= 2.0;
    }
    breaks.push(k_max);

    let body = adaptive(&mut integrand, &breaks, cfg.tolerance(), cfg.max_evals);
    let tail = gauss_kronrod_21(&mut integrand, k_max, 2.0 * k_max);
    let tail_ok = tail.value.abs() <= 0.1 * cfg.rel_tol * body.value.abs() + cfg.abs_tol;
    Estimate {
        value: body.value,
        error: body.error + tail.value.abs(),
        evaluations: body.evaluations + 21,
        converged: body.converged && tail_ok,
    }
}
