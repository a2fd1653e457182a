use num_traits::Float;

/// Below this argument the moments come from the power series in `c`;
/// above it from the upward recurrence. The recurrence multiplies rounding
/// errors by `n/c` per step, which stays below 1.5 for `c ≥ 2`.
pub const SERIES_SWITCH: f64 = 2.0;

/// Scaled exponential moments `Ĩₙ(c) = e^{−c} ∫₋₁¹ uⁿ e^{cu} du` for
/// `n = 0..=n_max` (`n_max ≤ 3`). Entries above `n_max` are zero.
///
/// The scaling keeps every entry in `(0, 2]` for all `c ≥ 0`, so nothing
/// overflows however sharp the angular peak is.
pub fn angular_moments_scaled(c: f64, n_max: usize) -> [f64; 4] {
    assert!(n_max <= 3, "moments are tabulated up to n = 3");
    assert!(c >= 0.0, "moment argument must be non-negative");
    let mut out = if c < SERIES_SWITCH {
        series(c)
    } else {
        recurrence(c)
    };
    for m in out.iter_mut().skip(n_max + 1) {
        *m = 0.0;
    }
    out
}

// e^{-c} Σ_j c^j/j! ∫ u^{n+j} du; every term is non-negative.
fn series(c: f64) -> [f64; 4] {
    let mut sums = [0.0; 4];
    let mut term = 1.0; // c^j / j!
    let mut j = 0usize;
    loop {
        for (n, s) in sums.iter_mut().enumerate() {
            let p = n + j;
            if p % 2 == 0 {
                *s += term * 2.0 / (p as f64 + 1.0);
            }
        }
        j += 1;
        term *= c / j as f64;
        let smallest = sums.iter().copied().fold(f64::INFINITY, f64::min);
        if term == 0.0 || (j >= 2 && term <= 1e-18 * smallest) {
            break;
        }
    }
    let scale = (-c).exp();
    sums.map(|s| s * scale)
}

fn recurrence(c: f64) -> [f64; 4] {
    let e2 = (-2.0 * c).exp();
    let mut out = [0.0; 4];
    out[0] = -(-2.0 * c).exp_m1() / c;
    for n in 1..4 {
        let boundary = if n % 2 == 0 { 1.0 - e2 } else { 1.0 + e2 };
        out[n] = boundary / c - (n as f64 / c) * out[n - 1];
    }
    out
}
