use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;

use super::Estimate;

// 21-point Kronrod extension of the 10-point Gauss rule. Odd entries of
// `XGK` are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One application of the 21-point rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub error: f64,
    /// Integral of `|f|` under the same rule.
    pub resabs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Gauss-Kronrod 10/21 on `[lo, hi]` with the QUADPACK error heuristic.
pub fn gauss_kronrod_21<F>(f: &mut F, lo: f64, hi: f64) -> Panel
where
    F: FnMut(f64) -> f64 + ?Sized,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut resabs = kronrod.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let value = kronrod * half;
    let resabs = resabs * width;
    let resasc = resasc * width;
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }

    Panel {
        lo,
        hi,
        value,
        error,
        resabs,
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Ranked {
    error: f64,
    index: usize,
}

impl Eq for Ranked {}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of [`adaptive`] with the extra bookkeeping the nested drivers need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct AdaptiveOutcome {
    pub estimate: Estimate,
    pub resabs: f64,
}

/// Globally adaptive bisection over the panels delimited by `breaks`
/// (sorted, at least two entries).
///
/// The panel with the largest error estimate is bisected until the summed
/// error meets `tol`, a panel can no longer be split, or the budget of
/// `max_evals` integrand calls is spent.
pub fn adaptive<F>(f: &mut F, breaks: &[f64], tol: Tolerance, max_evals: u64) -> Estimate
where
    F: FnMut(f64) -> f64 + ?Sized,
{
    adaptive_detailed(f, breaks, tol, max_evals).estimate
}

pub(crate) fn adaptive_detailed<F>(
    f: &mut F,
    breaks: &[f64],
    tol: Tolerance,
    max_evals: u64,
) -> AdaptiveOutcome
where
    F: FnMut(f64) -> f64 + ?Sized,
{
    debug_assert!(breaks.len() >= 2);
    let mut panels: Vec<Option<Panel>> = Vec::with_capacity(2 * breaks.len() + 32);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0u64;

    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let p = gauss_kronrod_21(f, w[0], w[1]);
            evaluations += 21;
            heap.push(Ranked {
                error: p.error,
                index: panels.len(),
            });
            panels.push(Some(p));
        }
    }

    let mut converged;
    loop {
        let (value, error) = totals(&panels);
        converged = error <= tol.target(value) || error == 0.0;
        if converged || evaluations + 42 > max_evals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let p = panels[worst.index].expect("live panel");
        let mid = 0.5 * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) || (p.hi - p.lo) <= 1e3 * f64::EPSILON * p.lo.abs().max(p.hi.abs()) {
            // Unsplittable at double precision; keep the panel and stop.
            break;
        }
        panels[worst.index] = None;
        for (lo, hi) in [(p.lo, mid), (mid, p.hi)] {
            let child = gauss_kronrod_21(f, lo, hi);
            evaluations += 21;
            heap.push(Ranked {
                error: child.error,
                index: panels.len(),
            });
            panels.push(Some(child));
        }
    }

    let mut live: Vec<Panel> = panels.into_iter().flatten().collect();
    live.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = live.iter().map(|p| p.value).sum();
    let error = live.iter().map(|p| p.error).sum();
    let resabs = live.iter().map(|p| p.resabs).sum();
    AdaptiveOutcome {
        estimate: Estimate {
            value,
            error,
            evaluations,
            converged,
        },
        resabs,
    }
}

fn totals(panels: &[Option<Panel>]) -> (f64, f64) {
    panels
        .iter()
        .flatten()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}
