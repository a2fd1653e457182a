use core::f64::consts::PI;

use num_traits::Float;

use crate::error::Error;
use crate::params::{SystemParams, DEFAULT_DEGENERACY};
use crate::Result;

/// `e^x K_ν(x)` for integer order, `x > 0`.
///
/// Uses `K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt` and the trapezoidal rule,
/// which converges geometrically for this analytic, rapidly decaying
/// integrand. The step is shrunk as `1/√x` to resolve the Gaussian-like peak
/// at large `x`.
pub fn bessel_k_scaled(nu: u32, x: f64) -> f64 {
    assert!(x > 0.0, "K_nu needs a positive argument");
    let h = 0.1f64.min(0.5 / x.sqrt());
    let nu = nu as f64;
    let g = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (nu * t).cosh()
    };
    let mut sum = 0.5 * g(0.0);
    let mut j = 1u32;
    loop {
        let term = g(j as f64 * h);
        sum += term;
        if term <= 1e-18 * sum {
            break;
        }
        j += 1;
    }
    h * sum
}

/// Massless energy density `(g/4)·7π²T⁴/60`.
pub fn epsilon_massless(temperature: f64, degeneracy: f64) -> f64 {
    degeneracy / DEFAULT_DEGENERACY * 7.0 * PI * PI * temperature.powi(4) / 60.0
}

/// Energy density from the Boltzmann expansion of the Fermi-Dirac factor,
/// `f = Σₙ (−1)ⁿ⁺¹ e^{−nω/T}`, with each term integrated in closed form:
///
/// ```text
/// ∫₀^∞ k² e^{−βω} dk    = m² K₂(βm)/β
/// ∫₀^∞ k² ω e^{−βω} dk  = −∂_β[m² K₂(βm)/β] = 3m²K₂(βm)/β² + m³K₁(βm)/β
/// ε = g/(2π²) Σₙ (−1)ⁿ⁺¹ [3m²T² K₂(nm/T)/n² + m³T K₁(nm/T)/n]
/// ```
///
/// (using `K₂′(z) = −K₁(z) − 2K₂(z)/z`). Truncation error is bounded by the
/// first omitted term.
pub fn epsilon_bessel_series(params: &SystemParams, terms: u32) -> Result<f64> {
    let m = params.mass();
    let t = params.temperature();
    if m == 0.0 {
        return Err(Error::Domain {
            what: "mass (series needs m > 0; use epsilon_massless)",
            value: m,
        });
    }
    if terms < 1 {
        return Err(Error::InvalidParameter {
            name: "terms",
            value: terms as f64,
            reason: "need at least one term",
        });
    }
    let x = m / t;
    let mut sum = 0.0;
    // Smallest terms first.
    for n in (1..=terms).rev() {
        let nf = n as f64;
        let z = nf * x;
        let decay = (-z).exp();
        let k1 = bessel_k_scaled(1, z) * decay;
        let k2 = bessel_k_scaled(2, z) * decay;
        let term = 3.0 * m * m * t * t * k2 / (nf * nf) + m * m * m * t * k1 / nf;
        sum += if n % 2 == 1 { term } else { -term };
    }
    Ok(params.degeneracy() / (2.0 * PI * PI) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // K₁(1), K₂(1), K₁(5), K₂(0.5) from standard tables (Abramowitz & Stegun).
        let cases = [
            (1, 1.0, 0.601_907_230_197_234_6),
            (2, 1.0, 1.624_838_898_635_177_5),
            (1, 5.0, 0.004_044_613_445_452_164),
            (2, 0.5, 7.550_183_551_240_869),
            (0, 2.0, 0.113_893_872_749_533_44),
        ];
        for (nu, x, k) in cases {
            let got = bessel_k_scaled(nu, x) * (-x).exp();
            assert!((got - k).abs() / k < 1e-13, "K_{nu}({x}) = {got}, want {k}");
        }
    }

    #[test]
    fn recurrence_between_orders() {
        // K₂(x) = K₀(x) + 2K₁(x)/x.
        for x in [0.3, 1.0, 4.0, 40.0, 300.0] {
            let k0 = bessel_k_scaled(0, x);
            let k1 = bessel_k_scaled(1, x);
            let k2 = bessel_k_scaled(2, x);
            assert!((k2 - (k0 + 2.0 * k1 / x)).abs() / k2 < 1e-13, "x={x}");
        }
    }

    #[test]
    fn single_term_is_boltzmann_limit() {
        let p = SystemParams::new(20.0, 1.0, 1.0).unwrap();
        let one = epsilon_bessel_series(&p, 1).unwrap();
        let many = epsilon_bessel_series(&p, 30).unwrap();
        assert!((one - many).abs() / many < 2.0 * (-20.0f64).exp());
    }

    #[test]
    fn massless_is_rejected() {
        let p = SystemParams::new(0.0, 1.0, 1.0).unwrap();
        assert!(epsilon_bessel_series(&p, 30).is_err());
        assert!((epsilon_massless(1.0, 4.0) - 7.0 * PI * PI / 60.0).abs() < 1e-15);
    }
}
