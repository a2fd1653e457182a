//! Reduced variance integrands for the four energy-momentum tensors.
//!
//! With `dK = d³k/((2π)³ 2ω)` and both momenta written in spherical
//! coordinates around a common axis, the azimuthal integrals give
//! `4π · 2π`, so
//!
//! ```text
//! ∫dK dK′ F(|k|, |k′|, k·k′)
//!     = 8π²/((2π)⁶ · 4) ∫₀^∞dk ∫₀^∞dk′ ∫₋₁¹du  k²k′²/(ωω′) F(k, k′, kk′u)
//!     = ∫dk dk′ du  k²k′²/(32π⁴ ωω′) F(k, k′, kk′u).
//! ```
//!
//! Every bracket has the form `P⁺ e^{−a²(k−k′)²/2} − P⁻ e^{−a²(k+k′)²/2}`
//! with polynomial weights `P±` of degree ≤ 3 in `u`. Since
//! `(k ∓ k′)² = (k − k′)² + 2kk′(1 ∓ u)` (vectors on the left, magnitudes on
//! the right), both exponentials share the factor `e^{−a²(k−k′)²/2}` and
//! their `u`-dependence is `e^{−c(1 ∓ u)}` with `c = a²kk′`. That exposes
//! the diagonal band `|k − k′| ≲ 1/a` and makes the `u` integral a sum of
//! exponential moments.
//!
//! The temperature-independent vacuum pieces are absent from the brackets,
//! so nothing is subtracted numerically.

use core::f64::consts::PI;

use num_traits::Float;

use crate::error::Error;
use crate::params::{PseudoGauge, SystemParams, DEFAULT_DEGENERACY};
use crate::quadrature::{
    angular_moments_scaled, integrate_variance_3d, AngularIntegrand, AngularSlice, Domain3,
    Estimate, QuadratureConfig,
};
use crate::thermal::{fermi_dirac, fermi_dirac_complement, on_shell_energy};
use crate::Result;

/// Angular measure constant `1/(32π⁴)` from `dK dK′` after the azimuthal
/// integrals.
pub const MEASURE: f64 = 1.0 / (32.0 * PI * PI * PI * PI);

/// Gauge-specific reduced integrand bound to one parameter point.
///
/// The kernel works in whatever energy unit its [`SystemParams`] use;
/// [`variance`] binds it in units of the temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceKernel {
    gauge: PseudoGauge,
    mass: f64,
    temperature: f64,
    radius_a: f64,
    prefactor: f64,
    degeneracy_scale: f64,
}

impl VarianceKernel {
    pub fn new(gauge: PseudoGauge, params: &SystemParams) -> Result<Self> {
        params.check_gauge(gauge)?;
        let m = params.mass();
        let prefactor = match gauge.kernel_gauge() {
            PseudoGauge::Canonical | PseudoGauge::BelinfanteRosenfeld => 2.0,
            PseudoGauge::Glw => 1.0 / (2.0 * m * m),
            PseudoGauge::Hw => 2.0 / (m * m),
        };
        Ok(VarianceKernel {
            gauge: gauge.kernel_gauge(),
            mass: m,
            temperature: params.temperature(),
            radius_a: params.radius_a(),
            prefactor,
            degeneracy_scale: params.degeneracy() / DEFAULT_DEGENERACY,
        })
    }

    /// Replaces the numeric prefactor. Only useful for seeded-fault tests of
    /// the identity checks.
    pub fn with_prefactor(mut self, prefactor: f64) -> Self {
        self.prefactor = prefactor;
        self
    }

    /// Gauge whose kernel is evaluated (Belinfante-Rosenfeld reports as
    /// canonical).
    pub fn gauge(&self) -> PseudoGauge {
        self.gauge
    }

    /// `2` (canonical), `1/(2m²)` (GLW) or `2/m²` (HW), for degeneracy 4.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    fn invariants(&self, k: f64, kp: f64) -> Invariants {
        let w = on_shell_energy(k, self.mass);
        let wp = on_shell_energy(kp, self.mass);
        let m2 = self.mass * self.mass;
        let a = w * wp;
        let b = k * kp;
        // ωω′ − kk′ and ωω′ − kk′ − m² in forms without cancellation:
        // (ωω′)² − (kk′)² = m²(k² + k′² + m²) and
        // k² + k′² + m² − ωω′ − kk′ = ((ω − ω′)² + (k − k′)²)/2.
        let w_minus = if k == kp { 0.0 } else { (k - kp) * (k + kp) / (w + wp) };
        let gap = m2 * (k * k + kp * kp + m2) / (a + b);
        let gap_m = m2 * 0.5 * (w_minus * w_minus + (k - kp) * (k - kp)) / (a + b);
        Invariants {
            w,
            wp,
            w_plus: w + wp,
            w_minus,
            b,
            gap: if a + b > 0.0 { gap } else { 0.0 },
            gap_m: if a + b > 0.0 { gap_m } else { 0.0 },
            m2,
        }
    }

    /// Weight `P⁺` of the `e^{−a²(k−k′)²/2}` term, with `k·k′ = kk′u`.
    pub fn direct_poly(&self, k: f64, kp: f64, u: f64) -> f64 {
        self.invariants(k, kp).direct(self.gauge, u)
    }

    /// Weight `P⁻` of the `e^{−a²(k+k′)²/2}` term.
    pub fn exchange_poly(&self, k: f64, kp: f64, u: f64) -> f64 {
        self.invariants(k, kp).exchange(self.gauge, u)
    }

    /// Coefficients of `P⁺` in powers of `u`.
    pub fn direct_coefficients(&self, k: f64, kp: f64) -> [f64; 4] {
        self.invariants(k, kp).direct_coefficients(self.gauge)
    }

    /// Coefficients of `P⁻` in powers of `u`.
    pub fn exchange_coefficients(&self, k: f64, kp: f64) -> [f64; 4] {
        self.invariants(k, kp).exchange_coefficients(self.gauge)
    }

    /// `prefactor·[P⁺e^{−a²(k−k′)²/2} − P⁻e^{−a²(k+k′)²/2}]` for momenta of
    /// magnitude `k`, `k′` at relative angle `cos θ = u`.
    pub fn bracket(&self, k: f64, kp: f64, u: f64) -> f64 {
        let inv = self.invariants(k, kp);
        let (direct, exchange) = self.exponents(k, kp, u);
        self.prefactor * (inv.direct(self.gauge, u) * direct.exp() - inv.exchange(self.gauge, u) * exchange.exp())
    }

    /// Combined exponents of the direct and exchange Gaussians. Both are
    /// manifestly `≤ 0`.
    fn exponents(&self, k: f64, kp: f64, u: f64) -> (f64, f64) {
        let half_a2 = 0.5 * self.radius_a * self.radius_a;
        let d = k - kp;
        let kk = 2.0 * k * kp;
        (
            -half_a2 * (d * d + kk * (1.0 - u)),
            -half_a2 * (d * d + kk * (1.0 + u)),
        )
    }

    /// `(g/4)·k²k′²/(32π⁴ωω′)·f(ω)(1 − f(ω′))`.
    fn measure(&self, k: f64, kp: f64, inv: &Invariants) -> f64 {
        let t = self.temperature;
        self.degeneracy_scale
            * MEASURE
            * k_squared_over_omega(k, inv.w)
            * k_squared_over_omega(kp, inv.wp)
            * fermi_dirac(inv.w, t)
            * fermi_dirac_complement(inv.wp, t)
    }

    /// Reduced integrand `W(k, k′, u)`; `σ² = ∫dk ∫dk′ ∫du W`.
    pub fn integrand(&self, k: f64, kp: f64, u: f64) -> f64 {
        self.slice(k, kp).eval(u)
    }

    fn domain(&self, cfg: &QuadratureConfig) -> Domain3 {
        Domain3 {
            k_max: cfg.k_max(self.temperature),
            kp_max: f64::INFINITY,
            band: cfg.band_sigmas / self.radius_a,
            ridge: Some(1.0 / self.radius_a),
            outer_scale: self.temperature,
            tail_checks: true,
        }
    }

    /// `σ²` in the kernel's own units.
    pub fn integrate(&self, cfg: &QuadratureConfig) -> Result<Estimate> {
        cfg.validate()?;
        Ok(integrate_variance_3d(self, &self.domain(cfg), cfg))
    }
}

fn k_squared_over_omega(k: f64, w: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * (k / w)
    }
}

/// Scalar invariants of a momentum pair. Every factor of `P±` is written as
/// a sum of non-negative terms, e.g. `ωω′ + kk′u + m² = gap + kk′(1 + u) + m²`,
/// so nothing cancels near the coincidence points `k′ = k, u = ±1`.
#[derive(Debug, Clone, Copy)]
struct Invariants {
    w: f64,
    wp: f64,
    /// ω + ω′
    w_plus: f64,
    /// ω − ω′
    w_minus: f64,
    /// kk′
    b: f64,
    /// ωω′ − kk′ ≥ m²
    gap: f64,
    /// ωω′ − kk′ − m² ≥ 0
    gap_m: f64,
    m2: f64,
}

impl Invariants {
    fn direct(&self, gauge: PseudoGauge, u: f64) -> f64 {
        let s2 = self.w_plus * self.w_plus;
        let plus = self.gap + self.b * (1.0 + u) + self.m2;
        let minus = self.gap + self.b * (1.0 - u) + self.m2;
        match gauge {
            PseudoGauge::Canonical | PseudoGauge::BelinfanteRosenfeld => s2 * plus,
            PseudoGauge::Glw => s2 * s2 * minus,
            PseudoGauge::Hw => plus * plus * minus,
        }
    }

    fn exchange(&self, gauge: PseudoGauge, u: f64) -> f64 {
        let d2 = self.w_minus * self.w_minus;
        let plus = self.gap_m + self.b * (1.0 + u);
        let minus = self.gap_m + self.b * (1.0 - u);
        match gauge {
            PseudoGauge::Canonical | PseudoGauge::BelinfanteRosenfeld => d2 * plus,
            PseudoGauge::Glw => d2 * d2 * minus,
            PseudoGauge::Hw => plus * plus * minus,
        }
    }

    fn direct_coefficients(&self, gauge: PseudoGauge) -> [f64; 4] {
        let s2 = self.w_plus * self.w_plus;
        Self::coefficients(gauge, s2, self.gap + self.b + self.m2, self.b)
    }

    fn exchange_coefficients(&self, gauge: PseudoGauge) -> [f64; 4] {
        let d2 = self.w_minus * self.w_minus;
        Self::coefficients(gauge, d2, self.gap_m + self.b, self.b)
    }

    // Shared shapes: q·(α + βu), q²·(α − βu) and (α + βu)²(α − βu),
    // with α = ωω′ ± m² and β = kk′.
    fn coefficients(gauge: PseudoGauge, q: f64, alpha: f64, beta: f64) -> [f64; 4] {
        match gauge {
            PseudoGauge::Canonical | PseudoGauge::BelinfanteRosenfeld => {
                [q * alpha, q * beta, 0.0, 0.0]
            }
            PseudoGauge::Glw => {
                let q2 = q * q;
                [q2 * alpha, -q2 * beta, 0.0, 0.0]
            }
            PseudoGauge::Hw => {
                let a2 = alpha * alpha;
                let b2 = beta * beta;
                [a2 * alpha, a2 * beta, -alpha * b2, -b2 * beta]
            }
        }
    }
}

/// [`VarianceKernel`] restricted to fixed `(k, k′)`.
pub struct KernelSlice<'a> {
    kernel: &'a VarianceKernel,
    inv: Invariants,
    k: f64,
    kp: f64,
    measure: f64,
}

impl AngularSlice for KernelSlice<'_> {
    fn eval(&self, u: f64) -> f64 {
        if self.measure == 0.0 {
            return 0.0;
        }
        let g = self.kernel.gauge;
        let (direct, exchange) = self.kernel.exponents(self.k, self.kp, u);
        self.measure
            * self.kernel.prefactor
            * (self.inv.direct(g, u) * direct.exp() - self.inv.exchange(g, u) * exchange.exp())
    }

    fn sharpness(&self) -> f64 {
        self.kernel.radius_a * self.kernel.radius_a * self.k * self.kp
    }

    fn closed_form(&self) -> Option<f64> {
        if self.measure == 0.0 {
            return Some(0.0);
        }
        let g = self.kernel.gauge;
        let order = if g == PseudoGauge::Hw { 3 } else { 1 };
        let moments = angular_moments_scaled(self.sharpness(), order);
        let plus = self.inv.direct_coefficients(g);
        let minus = self.inv.exchange_coefficients(g);
        let mut sum = 0.0;
        for n in 0..=order {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += (plus[n] - sign * minus[n]) * moments[n];
        }
        let d = self.k - self.kp;
        let gauss = (-0.5 * self.kernel.radius_a * self.kernel.radius_a * d * d).exp();
        Some(self.measure * self.kernel.prefactor * gauss * sum)
    }
}

impl AngularIntegrand for VarianceKernel {
    type Slice<'a> = KernelSlice<'a>;

    fn slice(&self, k: f64, kp: f64) -> KernelSlice<'_> {
        let inv = self.invariants(k, kp);
        KernelSlice {
            kernel: self,
            inv,
            k,
            kp,
            measure: self.measure(k, kp, &inv),
        }
    }
}

/// Reduced integrand `W_G(k, k′, u)` at a physical parameter point, such
/// that `σ²_G = ∫₀^∞dk ∫₀^∞dk′ ∫₋₁¹du W_G`.
pub fn reduced_integrand(
    gauge: PseudoGauge,
    k: f64,
    kp: f64,
    u: f64,
    params: &SystemParams,
) -> Result<f64> {
    if !(u.abs() <= 1.0) {
        return Err(Error::Domain { what: "u", value: u });
    }
    for (what, value) in [("k", k), ("k'", kp)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Domain { what, value });
        }
    }
    Ok(VarianceKernel::new(gauge, params)?.integrand(k, kp, u))
}

/// Variance `σ²` of the smeared energy density for one tensor choice.
///
/// The integral is done in units of `T` and scaled by `T⁸`. A non-converged
/// quadrature returns its best estimate with `converged = false`.
pub fn variance(gauge: PseudoGauge, params: &SystemParams, cfg: &QuadratureConfig) -> Result<Estimate> {
    let kernel = VarianceKernel::new(gauge, &params.in_thermal_units())?;
    let est = kernel.integrate(cfg)?;
    Ok(est.scaled(params.temperature().powi(8)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::AngularMode;
    use proptest::prelude::*;

    fn params(m: f64, t: f64, a: f64) -> SystemParams {
        SystemParams::new(m, t, a).unwrap()
    }

    const GAUGES: [PseudoGauge; 4] = PseudoGauge::ALL;

    #[test]
    fn prefactors() {
        let p = params(2.0, 1.0, 1.0);
        let pf = |g| VarianceKernel::new(g, &p).unwrap().prefactor();
        assert_eq!(pf(PseudoGauge::Canonical), 2.0);
        assert_eq!(pf(PseudoGauge::BelinfanteRosenfeld), 2.0);
        assert_eq!(pf(PseudoGauge::Glw), 1.0 / 8.0);
        assert_eq!(pf(PseudoGauge::Hw), 0.5);
    }

    #[test]
    fn zero_mass_rejected_for_glw_and_hw() {
        let p = params(0.0, 1.0, 1.0);
        for g in [PseudoGauge::Glw, PseudoGauge::Hw] {
            assert_eq!(
                reduced_integrand(g, 1.0, 1.0, 0.0, &p),
                Err(Error::MassRequiredForGauge { gauge: g })
            );
        }
        assert!(reduced_integrand(PseudoGauge::Canonical, 1.0, 1.0, 0.0, &p).unwrap() > 0.0);
        assert_eq!(reduced_integrand(PseudoGauge::Canonical, 0.0, 1.0, 0.0, &p), Ok(0.0));
    }

    #[test]
    fn angle_outside_range_rejected() {
        let p = params(1.0, 1.0, 1.0);
        assert!(matches!(
            reduced_integrand(PseudoGauge::Canonical, 1.0, 1.0, 1.5, &p),
            Err(Error::Domain { .. })
        ));
        assert!(reduced_integrand(PseudoGauge::Canonical, 1.0, 1.0, f64::NAN, &p).is_err());
        assert!(reduced_integrand(PseudoGauge::Canonical, -1.0, 1.0, 0.0, &p).is_err());
    }

    #[test]
    fn coefficients_reproduce_factored_polynomials() {
        let p = params(0.7, 1.0, 1.3);
        for g in GAUGES {
            let kern = VarianceKernel::new(g, &p).unwrap();
            for &(k, kp) in &[(0.3, 2.1), (4.0, 4.5), (9.0, 0.2)] {
                let cp = kern.direct_coefficients(k, kp);
                let cm = kern.exchange_coefficients(k, kp);
                for u in [-1.0, -0.4, 0.0, 0.5, 1.0] {
                    let horner = |c: [f64; 4]| ((c[3] * u + c[2]) * u + c[1]) * u + c[0];
                    let direct = kern.direct_poly(k, kp, u);
                    let exchange = kern.exchange_poly(k, kp, u);
                    let scale = direct.abs().max(1.0);
                    assert!((horner(cp) - direct).abs() <= 1e-12 * scale, "{g:?}");
                    assert!((horner(cm) - exchange).abs() <= 1e-12 * scale, "{g:?}");
                }
            }
        }
    }

    #[test]
    fn canonical_point_value() {
        // k = 1, k′ = 2, u = 0.3 at m = T = a = 1, against the bracket written
        // out by hand from the unreduced vector form.
        let (k, kp, u, m) = (1.0f64, 2.0f64, 0.3f64, 1.0f64);
        let w = (k * k + m * m).sqrt();
        let wp = (kp * kp + m * m).sqrt();
        let kvec = [k, 0.0, 0.0];
        let kpvec = [kp * u, kp * (1.0 - u * u).sqrt(), 0.0];
        let dot: f64 = kvec.iter().zip(&kpvec).map(|(x, y)| x * y).sum();
        let diff2: f64 = kvec.iter().zip(&kpvec).map(|(x, y)| (x - y) * (x - y)).sum();
        let sum2: f64 = kvec.iter().zip(&kpvec).map(|(x, y)| (x + y) * (x + y)).sum();
        let bracket = (w + wp).powi(2) * (w * wp + dot + m * m) * (-0.5 * diff2).exp()
            - (w - wp).powi(2) * (w * wp + dot - m * m) * (-0.5 * sum2).exp();
        let f = 1.0 / (w.exp() + 1.0);
        let fc = 1.0 - 1.0 / (wp.exp() + 1.0);
        let expected = 2.0 * k * k * kp * kp / (32.0 * PI.powi(4) * w * wp) * f * fc * bracket;
        let got = reduced_integrand(PseudoGauge::Canonical, k, kp, u, &params(m, 1.0, 1.0)).unwrap();
        assert!(got > 0.0);
        assert!((got - expected).abs() / expected < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn br_kernel_is_canonical_kernel() {
        let p = params(1.0, 1.0, 1.0);
        let can = VarianceKernel::new(PseudoGauge::Canonical, &p).unwrap();
        let br = VarianceKernel::new(PseudoGauge::BelinfanteRosenfeld, &p).unwrap();
        assert_eq!(can, br);
    }

    #[test]
    fn huge_radius_does_not_overflow() {
        let p = params(1.0, 1.0, 50.0);
        for g in GAUGES {
            let w = reduced_integrand(g, 10.0, 10.0, -1.0, &p).unwrap();
            assert!(w.is_finite());
            let w = reduced_integrand(g, 10.0, 10.01, 1.0, &p).unwrap();
            assert!(w.is_finite() && w > 0.0);
        }
    }

    proptest! {
        #[test]
        fn coincidence_identity(k in 0.0f64..10.0, m in 0.1f64..10.0) {
            let p = params(m, 1.0, 1.0);
            let w = on_shell_energy(k, m);
            let target = 16.0 * w.powi(4);
            for g in GAUGES {
                let kern = VarianceKernel::new(g, &p).unwrap();
                let direct = kern.prefactor() * kern.direct_poly(k, k, 1.0);
                prop_assert!((direct - target).abs() <= 1e-12 * target, "{:?}", g);
                let exchange = kern.prefactor() * kern.exchange_poly(k, k, -1.0);
                prop_assert!(exchange.abs() <= 1e-12 * target, "{:?}", g);
            }
        }

        #[test]
        fn polynomials_symmetric_in_momenta(k in 0.0f64..20.0, kp in 0.0f64..20.0, u in -1.0f64..1.0, m in 0.1f64..5.0) {
            let p = params(m, 1.0, 1.0);
            for g in GAUGES {
                let kern = VarianceKernel::new(g, &p).unwrap();
                let (a, b) = (kern.direct_poly(k, kp, u), kern.direct_poly(kp, k, u));
                prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(b.abs()).max(1e-300));
                let (a, b) = (kern.exchange_poly(k, kp, u), kern.exchange_poly(kp, k, u));
                let scale = kern.direct_poly(k, kp, u).abs();
                prop_assert!((a - b).abs() <= 1e-13 * scale);
            }
        }

        #[test]
        fn closed_form_matches_numeric_angle(k in 0.05f64..15.0, kp in 0.05f64..15.0, a in 0.2f64..5.0) {
            let p = params(1.0, 1.0, a);
            for g in GAUGES {
                let kern = VarianceKernel::new(g, &p).unwrap();
                let slice = kern.slice(k, kp);
                let exact = slice.closed_form().unwrap();
                let mut f = |u: f64| slice.eval(u);
                let c = slice.sharpness();
                let mut breaks = alloc::vec![-1.0, 1.0];
                if c > 4.0 {
                    breaks.extend([-1.0 + 1.0 / c, 1.0 - 1.0 / c]);
                    breaks.sort_by(|x, y| x.total_cmp(y));
                }
                let num = crate::quadrature::adaptive(
                    &mut f,
                    &breaks,
                    crate::quadrature::Tolerance { rel: 1e-11, abs: 0.0 },
                    1_000_000,
                );
                let scale = exact.abs().max(1e-250);
                prop_assert!((num.value - exact).abs() <= 1e-9 * scale, "{:?}: {} vs {}", g, num.value, exact);
            }
        }
    }

    #[test]
    fn cold_limit_variance_vanishes() {
        let cfg = QuadratureConfig::default();
        for g in GAUGES {
            let s = variance(g, &params(1.0, 1e-4, 1.0), &cfg).unwrap();
            assert!(s.value.abs() < 1e-30, "{g:?}: {}", s.value);
        }
    }

    #[test]
    fn br_variance_bitwise_equal() {
        let cfg = QuadratureConfig::default();
        let p = params(1.0, 1.0, 1.0);
        let can = variance(PseudoGauge::Canonical, &p, &cfg).unwrap();
        let br = variance(PseudoGauge::BelinfanteRosenfeld, &p, &cfg).unwrap();
        assert_eq!(can.value.to_bits(), br.value.to_bits());
        assert_eq!(can.error.to_bits(), br.error.to_bits());
    }

    #[test]
    fn modes_agree_at_reference_point() {
        let p = params(1.0, 1.0, 1.0);
        let base = QuadratureConfig::default();
        let a = variance(PseudoGauge::Canonical, &p, &base.with_angular_mode(AngularMode::AnalyticMoments)).unwrap();
        let n = variance(PseudoGauge::Canonical, &p, &base.with_angular_mode(AngularMode::Numeric)).unwrap();
        assert!(a.converged && n.converged);
        assert!(a.value > 0.0);
        assert!((a.value - n.value).abs() / a.value < 1e-6, "{} vs {}", a.value, n.value);
    }
}
