use std::f64::consts::PI;

use pgfluct_core::oracle::{energy_integrand, epsilon_bessel_series, epsilon_massless};
use pgfluct_core::quadrature::integrate_radial;
use pgfluct_core::{energy_density, PseudoGauge, QuadratureConfig, SystemParams};

fn eps(m: f64, t: f64, cfg: &QuadratureConfig) -> f64 {
    let p = SystemParams::new(m, t, 1.0).unwrap();
    energy_density(&p, cfg).unwrap().require_converged().unwrap().value
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn increases_with_temperature() {
    let cfg = QuadratureConfig::default();
    for ratio in [0.0, 0.5, 1.0, 2.0, 5.0] {
        // fixed m, temperature stepped up around m/T = ratio
        let m = ratio;
        let base = 1.0;
        let mut last = 0.0;
        for step in 0..6 {
            let t = base * 1.25f64.powi(step);
            let e = eps(m, t, &cfg);
            assert!(e > last, "m={m} T={t}: {e} <= {last}");
            last = e;
        }
    }
}

#[test]
fn scales_as_t_to_the_fourth() {
    let cfg = QuadratureConfig::default().with_rel_tol(1e-11);
    for ratio in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let reference = eps(ratio, 1.0, &cfg);
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = eps(lambda * ratio, lambda, &cfg);
            let expected = lambda.powi(4) * reference;
            assert!(rel(scaled, expected) <= 1e-10, "m/T={ratio} λ={lambda}: {:e}", rel(scaled, expected));
        }
    }
}

#[test]
fn massless_limit_is_continuous() {
    let cfg = QuadratureConfig::default().with_rel_tol(1e-11);
    let zero = eps(0.0, 1.0, &cfg);
    assert!(rel(zero, 7.0 * PI * PI / 60.0) <= 1e-8);
    assert!(rel(zero, epsilon_massless(1.0, 4.0)) <= 1e-8);
    for m in [1e-6, 1e-7, 1e-9] {
        assert!(rel(eps(m, 1.0, &cfg), zero) < 1e-9, "m={m}");
    }
}

#[test]
fn bessel_series_agrees_with_quadrature() {
    let cfg = QuadratureConfig::default().with_rel_tol(1e-11);
    for (ratio, terms, tol) in [(0.5, 60, 1e-8), (1.0, 60, 1e-8), (5.0, 30, 1e-10)] {
        let p = SystemParams::new(ratio, 1.0, 1.0).unwrap();
        let series = epsilon_bessel_series(&p, terms).unwrap();
        let quad = energy_density(&p, &cfg).unwrap().value;
        assert!(rel(quad, series) <= tol, "m/T={ratio}: {:e}", rel(quad, series));
    }
}

#[test]
fn transcribed_integrands_agree_across_tensors() {
    let cfg = QuadratureConfig::default().with_rel_tol(1e-12);
    for ratio in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let p = SystemParams::new(ratio, 1.0, 1.0).unwrap();
        let values: Vec<f64> = PseudoGauge::ALL
            .iter()
            .map(|&g| {
                let e = integrate_radial(|k| 4.0 * PI * k * k * energy_integrand(g, k, &p), 1.0, &cfg);
                assert!(e.converged);
                e.value
            })
            .collect();
        let shared = energy_density(&p, &cfg).unwrap().value;
        for v in &values {
            assert!(rel(*v, shared) <= 1e-10, "m/T={ratio}: {values:?} vs {shared}");
        }
    }
}

#[test]
fn degeneracy_enters_linearly() {
    let cfg = QuadratureConfig::default();
    let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
    let two = p.with_degeneracy(2.0).unwrap();
    let a = energy_density(&p, &cfg).unwrap().value;
    let b = energy_density(&two, &cfg).unwrap().value;
    assert_eq!(b, a * 0.5);
}
