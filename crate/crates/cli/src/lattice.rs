use pgfluct_core::oracle::{LatticeSpec, LatticeSum};
use pgfluct_core::{PseudoGauge, SystemParams};
use rayon::prelude::*;

/// Outer representatives per work item. Fixed, so the grouping of the
/// floating-point sum (and hence the result) does not depend on the number
/// of threads.
const CHUNK: usize = 64;

/// Lattice estimate of `σ²` with the outer mode sum spread over the current
/// rayon pool. Chunk totals are reduced in chunk order.
pub fn variance_lattice_parallel(
    gauge: PseudoGauge,
    params: &SystemParams,
    spec: &LatticeSpec,
) -> pgfluct_core::Result<f64> {
    let sum = LatticeSum::new(gauge, params, spec)?;
    let n = sum.outer_len();
    let partials: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| sum.partial(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect();
    Ok(sum.finish(partials.iter().sum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pgfluct_core::oracle::variance_lattice_sum;

    #[test]
    fn independent_of_thread_count() {
        let p = SystemParams::new(1.0, 1.0, 1.0).unwrap();
        let spec = LatticeSpec::for_params(&p, 4.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| variance_lattice_parallel(PseudoGauge::Hw, &p, &spec).unwrap())
        };
        let one = run(1);
        assert_eq!(one.to_bits(), run(3).to_bits());
        let serial = variance_lattice_sum(PseudoGauge::Hw, &p, &spec).unwrap();
        assert!((one - serial).abs() <= 1e-12 * serial.abs());
    }
}
