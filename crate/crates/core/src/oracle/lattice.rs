use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use num_traits::Float;

use super::bracket::{bracket_from_invariants, BracketInputs};
use crate::error::Error;
use crate::params::{PseudoGauge, SystemParams, DEFAULT_DEGENERACY};
use crate::Result;

/// Occupation below which modes are dropped from the box.
const MODE_CUTOFF_OCCUPATION: f64 = 1e-10;

/// `(a²/2)|k − k′|²` beyond which a Gaussian factor is treated as zero.
const GAUSS_EXPONENT_CUTOFF: f64 = 40.0;

/// Periodic box `[0, L)³` with modes `k = (2π/L)·n`, `|n|∞ ≤ n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub box_length: f64,
    pub n_max: u32,
    /// Refuse to run above this many mode pairs.
    pub max_pairs: u64,
}

impl LatticeSpec {
    /// Smallest cube whose face modes already have `f(ω) < 1e-10`.
    pub fn for_params(params: &SystemParams, box_length: f64) -> Self {
        let spacing = 2.0 * PI / box_length;
        let mut n = 1u32;
        while occupation(n as f64 * spacing, params) >= MODE_CUTOFF_OCCUPATION {
            n += 1;
        }
        LatticeSpec {
            box_length,
            n_max: n,
            max_pairs: 20_000_000_000,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Corner mode occupation below `1e-10`.
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "box_length",
                value: self.box_length,
                reason: "must be finite and positive",
            });
        }
        let corner = 3f64.sqrt() * self.n_max as f64 * self.spacing();
        if occupation(corner, params) >= MODE_CUTOFF_OCCUPATION {
            return Err(Error::InvalidParameter {
                name: "n_max",
                value: self.n_max as f64,
                reason: "corner mode occupation must be below 1e-10",
            });
        }
        Ok(())
    }

    /// Whether the mode spacing is finer than `T/4`.
    pub fn resolves_thermal_scale(&self, params: &SystemParams) -> bool {
        self.spacing() < 0.25 * params.temperature()
    }
}

fn occupation(k: f64, params: &SystemParams) -> f64 {
    let w = (k * k + params.mass() * params.mass()).sqrt();
    1.0 / ((w / params.temperature()).exp() + 1.0)
}

/// Lattice estimate of `σ²`, split into independent chunks over the outer
/// mode so callers can distribute the work and reduce in order.
#[derive(Debug, Clone)]
pub struct LatticeSum {
    gauge: PseudoGauge,
    mass: f64,
    spacing: f64,
    n_max: i32,
    normalization: f64,
    /// Representatives `0 ≤ n_z ≤ n_y ≤ n_x` with their orbit sizes under the
    /// 48 cube symmetries.
    outer: Vec<([i32; 3], f64)>,
    /// Offsets `d` with `|d|² ≤ radius²`.
    offsets: Vec<[i32; 3]>,
    radius2: i64,
    /// ω, f(ω) and 1 − f(ω) indexed by `|n|²`.
    omega: Vec<f64>,
    occ: Vec<f64>,
    occ_c: Vec<f64>,
    /// `e^{−(a²/2)Δ² j}` for `j ≤ radius²`.
    gauss: Vec<f64>,
}

impl LatticeSum {
    pub fn new(gauge: PseudoGauge, params: &SystemParams, spec: &LatticeSpec) -> Result<Self> {
        params.check_gauge(gauge)?;
        spec.validate(params)?;
        let spacing = spec.spacing();
        let n_max = spec.n_max as i32;
        let a = params.radius_a();
        let half_a2_d2 = 0.5 * a * a * spacing * spacing;
        let radius2 = (GAUSS_EXPONENT_CUTOFF / half_a2_d2).ceil() as i64;
        let radius = (radius2 as f64).sqrt().floor() as i32;

        let mut offsets = Vec::new();
        for x in -radius..=radius {
            for y in -radius..=radius {
                for z in -radius..=radius {
                    if (x * x + y * y + z * z) as i64 <= radius2 {
                        offsets.push([x, y, z]);
                    }
                }
            }
        }

        let mut outer = Vec::new();
        for x in 0..=n_max {
            for y in 0..=x {
                for z in 0..=y {
                    outer.push(([x, y, z], orbit_size([x, y, z])));
                }
            }
        }

        let required = outer.len() as u64 * 2 * offsets.len() as u64;
        if required > spec.max_pairs {
            return Err(Error::BudgetExceeded {
                required,
                limit: spec.max_pairs,
            });
        }

        let max_norm = 3 * (n_max as usize) * (n_max as usize);
        let m = params.mass();
        let t = params.temperature();
        let mut omega = Vec::with_capacity(max_norm + 1);
        let mut occ = Vec::with_capacity(max_norm + 1);
        let mut occ_c = Vec::with_capacity(max_norm + 1);
        for j in 0..=max_norm {
            let k2 = j as f64 * spacing * spacing;
            let w = (k2 + m * m).sqrt();
            omega.push(w);
            occ.push(1.0 / ((w / t).exp() + 1.0));
            occ_c.push(1.0 / ((-w / t).exp() + 1.0));
        }
        let gauss = (0..=radius2).map(|j| (-half_a2_d2 * j as f64).exp()).collect();

        let volume = spec.box_length.powi(3);
        Ok(LatticeSum {
            gauge,
            mass: m,
            spacing,
            n_max,
            normalization: params.degeneracy() / DEFAULT_DEGENERACY / (volume * volume),
            outer,
            offsets,
            radius2,
            omega,
            occ,
            occ_c,
            gauss,
        })
    }

    /// Number of outer representatives; chunk ranges index into `0..len`.
    pub fn outer_len(&self) -> usize {
        self.outer.len()
    }

    /// Mode pairs visited by a full sum.
    pub fn pair_count(&self) -> u64 {
        self.outer.len() as u64 * 2 * self.offsets.len() as u64
    }

    /// Unnormalized sum over outer representatives in `range`.
    pub fn partial(&self, range: Range<usize>) -> f64 {
        let mut total = 0.0;
        for &(n, weight) in &self.outer[range] {
            let norm_n = dot(n, n);
            if self.omega[norm_n as usize] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for d in &self.offsets {
                let np = [n[0] + d[0], n[1] + d[1], n[2] + d[2]];
                if self.inside(np) {
                    row += self.pair(n, np);
                }
            }
            // Partners near −k that the direct ball has not already covered.
            let mirror = [-n[0], -n[1], -n[2]];
            for d in &self.offsets {
                let np = [mirror[0] + d[0], mirror[1] + d[1], mirror[2] + d[2]];
                let from_n = [np[0] - n[0], np[1] - n[1], np[2] - n[2]];
                if self.inside(np) && dot(from_n, from_n) > self.radius2 {
                    row += self.pair(n, np);
                }
            }
            total += weight * row;
        }
        total
    }

    /// Applies `(1/L³)²` and the degeneracy to a total of [`Self::partial`].
    pub fn finish(&self, total: f64) -> f64 {
        self.normalization * total
    }

    fn inside(&self, n: [i32; 3]) -> bool {
        n.iter().all(|c| c.abs() <= self.n_max)
    }

    fn pair(&self, n: [i32; 3], np: [i32; 3]) -> f64 {
        let nn = dot(n, n) as usize;
        let npnp = dot(np, np) as usize;
        let w = self.omega[nn];
        let wp = self.omega[npnp];
        if wp == 0.0 {
            return 0.0;
        }
        let diff = [n[0] - np[0], n[1] - np[1], n[2] - np[2]];
        let sum = [n[0] + np[0], n[1] + np[1], n[2] + np[2]];
        let inputs = BracketInputs {
            omega: w,
            omega_p: wp,
            dot: dot(n, np) as f64 * self.spacing * self.spacing,
            mass: self.mass,
            gauss_minus: self.gauss_at(dot(diff, diff)),
            gauss_plus: self.gauss_at(dot(sum, sum)),
        };
        self.occ[nn] * self.occ_c[npnp] / (4.0 * w * wp) * bracket_from_invariants(self.gauge, &inputs)
    }

    fn gauss_at(&self, j: i64) -> f64 {
        if j <= self.radius2 {
            self.gauss[j as usize]
        } else {
            0.0
        }
    }
}

fn dot(a: [i32; 3], b: [i32; 3]) -> i64 {
    a.iter().zip(&b).map(|(x, y)| *x as i64 * *y as i64).sum()
}

/// Number of distinct images of `n` under coordinate permutations and sign
/// flips.
fn orbit_size(n: [i32; 3]) -> f64 {
    let [x, y, z] = n;
    let permutations = if x == y && y == z {
        1
    } else if x == y || y == z || x == z {
        3
    } else {
        6
    };
    let nonzero = n.iter().filter(|c| **c != 0).count();
    (permutations * (1 << nonzero)) as f64
}

/// `σ²` as a double sum over box modes with the vector-form bracket,
/// `∫d³k/(2π)³ → (1/L³)Σ_k`. Single-threaded; see [`LatticeSum`] for
/// chunked evaluation.
pub fn variance_lattice_sum(gauge: PseudoGauge, params: &SystemParams, spec: &LatticeSpec) -> Result<f64> {
    let sum = LatticeSum::new(gauge, params, spec)?;
    let total = sum.partial(0..sum.outer_len());
    Ok(sum.finish(total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_sizes_cover_the_cube() {
        let n_max = 3;
        let mut covered = 0.0;
        for x in 0..=n_max {
            for y in 0..=x {
                for z in 0..=y {
                    covered += orbit_size([x, y, z]);
                }
            }
        }
        assert_eq!(covered, ((2 * n_max + 1) as f64).powi(3));
    }

    #[test]
    fn spec_cutoff_invariant() {
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::for_params(&p, 16.0);
        spec.validate(&p).unwrap();
        assert!(occupation(spec.n_max as f64 * spec.spacing(), &p) < 1e-10);
        let short = LatticeSpec { n_max: 5, ..spec };
        assert!(short.validate(&p).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        let spec = LatticeSpec {
            max_pairs: 1000,
            ..LatticeSpec::for_params(&p, 8.0)
        };
        assert!(matches!(
            variance_lattice_sum(PseudoGauge::Canonical, &p, &spec),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn br_matches_canonical() {
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::for_params(&p, 4.0);
        let can = variance_lattice_sum(PseudoGauge::Canonical, &p, &spec).unwrap();
        let br = variance_lattice_sum(PseudoGauge::BelinfanteRosenfeld, &p, &spec).unwrap();
        assert_eq!(can.to_bits(), br.to_bits());
        assert!(can > 0.0);
    }

    #[test]
    fn chunks_add_up() {
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::for_params(&p, 4.0);
        let sum = LatticeSum::new(PseudoGauge::Hw, &p, &spec).unwrap();
        let whole = sum.partial(0..sum.outer_len());
        let mid = sum.outer_len() / 2;
        let split = sum.partial(0..mid) + sum.partial(mid..sum.outer_len());
        assert!((whole - split).abs() <= 1e-12 * whole.abs());
    }
}
