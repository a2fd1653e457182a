use core::f64::consts::PI;

use num_traits::Float;

use crate::error::Error;
use crate::params::{PseudoGauge, SystemParams, DEFAULT_DEGENERACY};
use crate::Result;

/// Scalar inputs of a variance bracket, computed from explicit 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketInputs {
    pub omega: f64,
    pub omega_p: f64,
    /// `k·k′`
    pub dot: f64,
    pub mass: f64,
    /// `e^{−a²(k−k′)²/2}`
    pub gauss_minus: f64,
    /// `e^{−a²(k+k′)²/2}`
    pub gauss_plus: f64,
}

/// The bracket of the variance integral including its numeric prefactor,
/// written directly in terms of `ω`, `ω′`, `k·k′` and `m`.
pub fn bracket_from_invariants(gauge: PseudoGauge, b: &BracketInputs) -> f64 {
    let BracketInputs {
        omega: w,
        omega_p: wp,
        dot,
        mass: m,
        gauss_minus,
        gauss_plus,
    } = *b;
    let m2 = m * m;
    let ww = w * wp;
    match gauge {
        PseudoGauge::Canonical | PseudoGauge::BelinfanteRosenfeld => {
            2.0 * ((w + wp).powi(2) * (ww + dot + m2) * gauss_minus
                - (w - wp).powi(2) * (ww + dot - m2) * gauss_plus)
        }
        PseudoGauge::Glw => {
            (1.0 / (2.0 * m2))
                * ((w + wp).powi(4) * (ww - dot + m2) * gauss_minus
                    - (w - wp).powi(4) * (ww - dot - m2) * gauss_plus)
        }
        PseudoGauge::Hw => {
            (2.0 / m2)
                * ((ww + dot + m2).powi(2) * (ww - dot + m2) * gauss_minus
                    - (ww + dot - m2).powi(2) * (ww - dot - m2) * gauss_plus)
        }
    }
}

/// Straight transcription of the variance bracket for explicit momentum
/// vectors `k`, `k′`.
pub fn bracket_transcription(
    gauge: PseudoGauge,
    kvec: [f64; 3],
    kpvec: [f64; 3],
    params: &SystemParams,
) -> Result<f64> {
    params.check_gauge(gauge)?;
    let m = params.mass();
    let a = params.radius_a();
    let dot3 = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let diff = [kvec[0] - kpvec[0], kvec[1] - kpvec[1], kvec[2] - kpvec[2]];
    let sum = [kvec[0] + kpvec[0], kvec[1] + kpvec[1], kvec[2] + kpvec[2]];
    let inputs = BracketInputs {
        omega: (dot3(kvec, kvec) + m * m).sqrt(),
        omega_p: (dot3(kpvec, kpvec) + m * m).sqrt(),
        dot: dot3(kvec, kpvec),
        mass: m,
        gauss_minus: (-0.5 * a * a * dot3(diff, diff)).exp(),
        gauss_plus: (-0.5 * a * a * dot3(sum, sum)).exp(),
    };
    if !inputs.dot.is_finite() {
        return Err(Error::Domain {
            what: "momentum vector",
            value: inputs.dot,
        });
    }
    Ok(bracket_from_invariants(gauge, &inputs))
}

/// Integrand of `ε = ∫d³k/(2π)³ (…)` for each tensor, transcribed one by one.
/// All four reduce to `g·ω·f(ω)/(2π)³`; they are kept separate so that the
/// equality of the means is checked rather than assumed.
pub fn energy_integrand(gauge: PseudoGauge, k: f64, params: &SystemParams) -> f64 {
    let m = params.mass();
    let t = params.temperature();
    let g = params.degeneracy() / DEFAULT_DEGENERACY;
    let cube = 8.0 * PI * PI * PI;
    match gauge {
        PseudoGauge::Canonical => {
            let w = (k * k + m * m).sqrt();
            g * 4.0 * w / ((w / t).exp() + 1.0) / cube
        }
        PseudoGauge::BelinfanteRosenfeld => {
            let w = (k * k + m * m).sqrt();
            let occupation = (-w / t).exp() / (1.0 + (-w / t).exp());
            g * 4.0 * w * occupation / cube
        }
        PseudoGauge::Glw => {
            let w = (k.powi(2) + m.powi(2)).sqrt();
            4.0 * g * w * (1.0 / (1.0 + (w / t).exp())) / cube
        }
        PseudoGauge::Hw => {
            let w = k.hypot(m);
            let x = w / t;
            (4.0 * g / cube) * w * (0.5 - 0.5 * (0.5 * x).tanh())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_modes() {
        let p = SystemParams::new(1.5, 1.0, 1.0).unwrap();
        let m = p.mass();
        // Both momenta zero: (2m)²(m² + m²) − 0.
        let b = bracket_transcription(PseudoGauge::Canonical, [0.0; 3], [0.0; 3], &p).unwrap();
        assert!((b - 2.0 * 8.0 * m.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn equal_vectors_give_coincidence_weight() {
        // At k′ = k every exchange weight vanishes on shell and the direct
        // Gaussian is 1, leaving 16ω⁴ for all tensors.
        let p = SystemParams::new(0.8, 1.0, 0.7).unwrap();
        let k = [0.3, -1.2, 2.0];
        let w2 = 0.09 + 1.44 + 4.0 + 0.64;
        for g in PseudoGauge::ALL {
            let b = bracket_transcription(g, k, k, &p).unwrap();
            let direct = 16.0 * w2 * w2;
            assert!((b - direct).abs() <= 1e-12 * direct, "{g:?}: {b} vs {direct}");
        }
    }

    #[test]
    fn zero_mass_glw_rejected() {
        let p = SystemParams::new(0.0, 1.0, 1.0).unwrap();
        assert!(bracket_transcription(PseudoGauge::Hw, [1.0, 0.0, 0.0], [0.0; 3], &p).is_err());
    }
}
