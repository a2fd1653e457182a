use alloc::vec::Vec;

use super::gk::{adaptive_detailed, gauss_kronrod_21, Tolerance};
use super::{AngularMode, Estimate, QuadratureConfig};

/// Integration region for [`integrate_variance_3d`]:
/// `k ∈ [0, k_max]`, `k′ ∈ [0, kp_max] ∩ [k − band, k + band]`, `u ∈ [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain3 {
    pub k_max: f64,
    pub kp_max: f64,
    /// Only `|k′ − k| ≤ band` contributes; `f64::INFINITY` for no band.
    pub band: f64,
    /// Width of the ridge along `k′ = k`, used to seed breakpoints.
    pub ridge: Option<f64>,
    /// Decay scale in `k`; seeds geometric breakpoints `scale·2ʲ`.
    pub outer_scale: f64,
    /// Check the discarded `k > k_max` and `|k′ − k| > band` regions a
    /// posteriori.
    pub tail_checks: bool,
}

impl Domain3 {
    /// Plain box `[0, k_max] × [0, kp_max] × [−1, 1]`.
    pub fn rectangle(k_max: f64, kp_max: f64) -> Self {
        Domain3 {
            k_max,
            kp_max,
            band: f64::INFINITY,
            ridge: None,
            outer_scale: k_max,
            tail_checks: false,
        }
    }
}

/// A function `W(k, k′, u)` to integrate over [`Domain3`].
pub trait AngularIntegrand {
    /// `u ↦ W(k, k′, u)` at fixed momenta, with any per-`(k, k′)` work done
    /// once.
    type Slice<'a>: AngularSlice
    where
        Self: 'a;

    fn slice(&self, k: f64, kp: f64) -> Self::Slice<'_>;
}

pub trait AngularSlice {
    fn eval(&self, u: f64) -> f64;

    /// `c` when the slice is peaked like `e^{−c(1 ∓ u)}`; seeds breakpoints
    /// toward `u = ±1`.
    fn sharpness(&self) -> f64 {
        0.0
    }

    /// `∫₋₁¹ W du` in closed form, if the integrand provides one.
    fn closed_form(&self) -> Option<f64> {
        None
    }
}

struct Bookkeeping {
    evaluations: u64,
    budget: u64,
    converged: bool,
    worst_inner_rel: f64,
}

impl Bookkeeping {
    fn record(&mut self, est: &Estimate) {
        self.converged &= est.converged;
        if est.error > 0.0 {
            let rel = if est.value != 0.0 {
                est.error / est.value.abs()
            } else {
                f64::INFINITY
            };
            if rel.is_finite() {
                self.worst_inner_rel = self.worst_inner_rel.max(rel);
            }
        }
    }

    fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.evaluations)
    }
}

/// Nested adaptive integration of `W(k, k′, u)` over `domain`.
///
/// The outer integral runs over `k`, the middle one over `k′` inside the
/// band around the diagonal, and the inner one over `u`, either numerically
/// or through the slice's closed form ([`AngularMode::AnalyticMoments`]).
/// All levels use [`adaptive`](super::adaptive), so the result is
/// deterministic.
pub fn integrate_variance_3d<K>(kernel: &K, domain: &Domain3, cfg: &QuadratureConfig) -> Estimate
where
    K: AngularIntegrand + ?Sized,
{
    let mut book = Bookkeeping {
        evaluations: 0,
        budget: cfg.max_evals,
        converged: true,
        worst_inner_rel: 0.0,
    };
    let inner_tol = Tolerance {
        rel: 0.1 * cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let angular_tol = Tolerance {
        rel: 0.02 * cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let outer_tol = Tolerance {
        rel: 0.5 * cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let mode = cfg.angular_mode;

    let outer_breaks = geometric_breaks(domain.k_max, domain.outer_scale);
    let outcome = {
        let book = &mut book;
        let mut outer = |k: f64| -> f64 {
            if book.remaining() == 0 {
                book.converged = false;
                return 0.0;
            }
            let (lo, hi) = partner_range(domain, k, domain.band);
            if hi <= lo {
                return 0.0;
            }
            let breaks = partner_breaks(k, lo, hi, domain.ridge);
            let mut angular_book = (0u64, true);
            let mut middle = |kp: f64| -> f64 {
                angular_integral(kernel, k, kp, mode, angular_tol, &mut angular_book)
            };
            let remaining = book.remaining();
            let inner = adaptive_detailed(&mut middle, &breaks, inner_tol, remaining).estimate;
            book.record(&inner);
            book.evaluations += angular_book.0;
            book.converged &= angular_book.1;
            inner.value
        };
        adaptive_detailed(&mut outer, &outer_breaks, outer_tol, u64::MAX)
    };

    let mut error = outcome.estimate.error + book.worst_inner_rel * outcome.resabs;
    let mut converged = book.converged && outcome.estimate.converged;
    if domain.tail_checks {
        let tail = tail_blocks(kernel, domain, mode, angular_tol, &mut book);
        error += tail.abs();
        if tail.abs() > 0.1 * cfg.rel_tol * outcome.estimate.value.abs() + cfg.abs_tol {
            converged = false;
        }
    }

    Estimate {
        value: outcome.estimate.value,
        error,
        evaluations: book.evaluations,
        converged,
    }
}

fn partner_range(domain: &Domain3, k: f64, band: f64) -> (f64, f64) {
    let lo = (k - band).max(0.0);
    let hi = (k + band).min(domain.kp_max);
    (lo, hi)
}

fn geometric_breaks(upper: f64, scale: f64) -> Vec<f64> {
    let mut breaks = alloc::vec![0.0];
    let mut edge = scale;
    while edge < upper {
        breaks.push(edge);
        edge *= 2.0;
    }
    breaks.push(upper);
    breaks
}

fn partner_breaks(k: f64, lo: f64, hi: f64, ridge: Option<f64>) -> Vec<f64> {
    let mut breaks = alloc::vec![lo, hi];
    if k > lo && k < hi {
        breaks.push(k);
    }
    if let Some(w) = ridge {
        for j in [-6.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 6.0] {
            let x = k + j * w;
            if x > lo && x < hi {
                breaks.push(x);
            }
        }
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    breaks
}

fn angular_breaks(c: f64) -> Vec<f64> {
    let mut breaks = alloc::vec![-1.0, 0.0, 1.0];
    if c > 4.0 {
        let mut t = 1.0 / c;
        while t < 0.5 {
            breaks.push(-1.0 + t);
            breaks.push(1.0 - t);
            t *= 4.0;
        }
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    breaks
}

fn angular_integral<K>(
    kernel: &K,
    k: f64,
    kp: f64,
    mode: AngularMode,
    tol: Tolerance,
    book: &mut (u64, bool),
) -> f64
where
    K: AngularIntegrand + ?Sized,
{
    let slice = kernel.slice(k, kp);
    if mode == AngularMode::AnalyticMoments {
        if let Some(v) = slice.closed_form() {
            book.0 += 1;
            return v;
        }
    }
    let breaks = angular_breaks(slice.sharpness());
    let mut f = |u: f64| slice.eval(u);
    let est = adaptive_detailed(&mut f, &breaks, tol, 2_000_000).estimate;
    book.0 += est.evaluations;
    book.1 &= est.converged;
    est.value
}

/// Fixed-rule estimate of what lies outside the integrated region: the
/// radial tail `k ∈ [k_max, 1.5 k_max]` and the strips
/// `band < |k′ − k| ≤ 1.5 band`.
fn tail_blocks<K>(
    kernel: &K,
    domain: &Domain3,
    mode: AngularMode,
    tol: Tolerance,
    book: &mut Bookkeeping,
) -> f64
where
    K: AngularIntegrand + ?Sized,
{
    let mut angular_book = (0u64, true);
    let mut total = 0.0;

    {
        let mut radial = |k: f64| -> f64 {
            let (lo, hi) = partner_range(domain, k, domain.band);
            if hi <= lo {
                return 0.0;
            }
            let mut g = |kp: f64| angular_integral(kernel, k, kp, mode, tol, &mut angular_book);
            gauss_kronrod_21(&mut g, lo, hi).value
        };
        total += gauss_kronrod_21(&mut radial, domain.k_max, 1.5 * domain.k_max).value;
    }

    if domain.band.is_finite() {
        let outer_breaks = geometric_breaks(domain.k_max, domain.outer_scale);
        let mut strips = |k: f64| -> f64 {
            let mut sum = 0.0;
            let b = domain.band;
            for (lo, hi) in [(k + b, k + 1.5 * b), (k - 1.5 * b, k - b)] {
                let lo = lo.max(0.0);
                let hi = hi.min(domain.kp_max);
                if hi > lo {
                    let mut g =
                        |kp: f64| angular_integral(kernel, k, kp, mode, tol, &mut angular_book);
                    sum += gauss_kronrod_21(&mut g, lo, hi).value;
                }
            }
            sum
        };
        for w in outer_breaks.windows(2) {
            total += gauss_kronrod_21(&mut strips, w[0], w[1]).value;
        }
    }

    book.evaluations += angular_book.0;
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Float;

    struct Constant;

    struct ConstantSlice;

    impl AngularSlice for ConstantSlice {
        fn eval(&self, _u: f64) -> f64 {
            1.0
        }
    }

    impl AngularIntegrand for Constant {
        type Slice<'a> = ConstantSlice;

        fn slice(&self, _k: f64, _kp: f64) -> ConstantSlice {
            ConstantSlice
        }
    }

    struct Separable;

    struct SeparableSlice(f64);

    impl AngularSlice for SeparableSlice {
        fn eval(&self, u: f64) -> f64 {
            self.0 * u * u
        }

        fn closed_form(&self) -> Option<f64> {
            Some(self.0 * 2.0 / 3.0)
        }
    }

    impl AngularIntegrand for Separable {
        type Slice<'a> = SeparableSlice;

        fn slice(&self, k: f64, kp: f64) -> SeparableSlice {
            SeparableSlice((-k).exp() * (-kp).exp())
        }
    }

    fn cfg(mode: AngularMode) -> QuadratureConfig {
        QuadratureConfig::default()
            .with_rel_tol(1e-10)
            .with_angular_mode(mode)
    }

    #[test]
    fn constant_kernel_gives_volume() {
        let est = integrate_variance_3d(
            &Constant,
            &Domain3::rectangle(1.0, 1.0),
            &cfg(AngularMode::Numeric),
        );
        assert!(est.converged);
        assert!((est.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn separable_kernel_in_both_modes() {
        let domain = Domain3 {
            outer_scale: 1.0,
            ..Domain3::rectangle(60.0, 60.0)
        };
        for mode in [AngularMode::Numeric, AngularMode::AnalyticMoments] {
            let est = integrate_variance_3d(&Separable, &domain, &cfg(mode));
            assert!(est.converged, "{mode:?}");
            assert!((est.value - 2.0 / 3.0).abs() < 1e-10, "{mode:?}: {}", est.value);
        }
    }

    #[test]
    fn budget_exhaustion_clears_converged_flag() {
        let c = QuadratureConfig {
            max_evals: 10_000,
            ..cfg(AngularMode::Numeric)
        };
        let domain = Domain3 {
            outer_scale: 1.0,
            ..Domain3::rectangle(60.0, 60.0)
        };
        let est = integrate_variance_3d(&Separable, &domain, &c);
        assert!(!est.converged);
    }

    #[test]
    fn band_restricts_partner_range() {
        let domain = Domain3 {
            band: 0.25,
            ..Domain3::rectangle(1.0, 1.0)
        };
        // Area of {|k − k′| ≤ 1/4} in the unit square is 1 − (3/4)² = 7/16.
        let est = integrate_variance_3d(&Constant, &domain, &cfg(AngularMode::Numeric));
        assert!((est.value - 2.0 * 7.0 / 16.0).abs() < 1e-10, "{}", est.value);
    }
}
