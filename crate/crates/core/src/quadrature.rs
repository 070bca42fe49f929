//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs, rel * |value|)`. Error estimates follow the
//! QUADPACK `qk21` heuristic. Integrands may be fallible so nested integrals
//! can propagate their own failures.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};

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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_270_431,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Weights of the embedded 10-point Gauss rule, at XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureResult {
    pub value: f64,
    pub estimated_error: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            estimated_error: 0.0,
            evaluations: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(rel: f64, abs: f64) -> Self {
        Tolerance {
            rel,
            abs,
            max_intervals: 2000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        let t = self.rel * value.abs();
        if t > self.abs {
            t
        } else {
            self.abs
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-6, 1e-9)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F, E>(f: &mut F, a: f64, b: f64) -> core::result::Result<(f64, f64), E>
where
    F: FnMut(f64) -> core::result::Result<f64, E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = libm::pow(200.0 * err / resasc, 1.5);
        err = resasc * if scale < 1.0 { scale } else { 1.0 };
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    Ok((result, err))
}

/// Integrates a fallible `f` over `[a, b]`.
///
/// `E` must absorb [`Error::NonConvergence`] so callers can carry their own
/// error type through nested integrals.
pub fn try_integrate<F, E>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> core::result::Result<QuadratureResult, E>
where
    F: FnMut(f64) -> core::result::Result<f64, E>,
    E: From<Error>,
{
    try_integrate_points(f, &[a, b], tol)
}

/// Like [`try_integrate`] with the range pre-split at the given ascending
/// `points` (first and last are the integration limits). Useful when the
/// integrand has a known kink or rapid transition.
pub fn try_integrate_points<F, E>(
    mut f: F,
    points: &[f64],
    tol: &Tolerance,
) -> core::result::Result<QuadratureResult, E>
where
    F: FnMut(f64) -> core::result::Result<f64, E>,
    E: From<Error>,
{
    assert!(
        points.len() >= 2,
        "need at least the two integration limits"
    );
    let mut heap = BinaryHeap::new();
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = gk21(&mut f, a, b)?;
        evaluations += 21;
        heap.push(Segment { a, b, value, error });
    }

    let mut total_value: f64 = heap.iter().map(|s| s.value).sum();
    let mut total_error: f64 = heap.iter().map(|s| s.error).sum();
    let mut intervals = heap.len();

    while total_error > tol.target(total_value) {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        // Too narrow to split further in floating point.
        if !(mid > seg.a && mid < seg.b) || (seg.b - seg.a).abs() <= 4.0 * f64::EPSILON * mid.abs()
        {
            settled_value += seg.value;
            settled_error += seg.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        if intervals >= tol.max_intervals {
            heap.push(seg);
            let requested = tol.target(total_value);
            return Err(Error::NonConvergence {
                achieved: total_error,
                requested,
            }
            .into());
        }
        let (v1, e1) = gk21(&mut f, seg.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, seg.b)?;
        evaluations += 42;
        intervals += 1;
        total_value += v1 + v2 - seg.value;
        total_error += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to shed the drift of the running totals.
    let value = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
    let estimated_error = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
    Ok(QuadratureResult {
        value,
        estimated_error,
        evaluations,
    })
}

/// Infallible-integrand convenience wrapper around [`try_integrate`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok::<f64, Error>(f(x)), a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x| x * x * x - 2.0 * x + 1.0,
            0.0,
            2.0,
            &Tolerance::default(),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(libm::sin, 0.0, PI, &Tolerance::new(1e-12, 0.0)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.estimated_error < 1e-11);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // integral of x^-1/2 on (0,1] is 2
        let r = integrate(
            |x| 1.0 / libm::sqrt(x),
            0.0,
            1.0,
            &Tolerance::new(1e-8, 0.0),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "{r:?}");
        assert!((r.value - 2.0).abs() <= r.estimated_error * 10.0);
    }

    #[test]
    fn breakpoints_match_plain() {
        let f = |x: f64| if x < 0.3 { x } else { 0.3 };
        let plain = integrate(f, 0.0, 1.0, &Tolerance::new(1e-10, 1e-14)).unwrap();
        let split = try_integrate_points(
            |x| Ok::<_, Error>(f(x)),
            &[0.0, 0.3, 1.0],
            &Tolerance::new(1e-10, 1e-14),
        )
        .unwrap();
        let exact = 0.045 + 0.21;
        assert!((plain.value - exact).abs() < 1e-9);
        assert!((split.value - exact).abs() < 1e-14);
        assert!(split.evaluations < plain.evaluations);
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            rel: 1e-14,
            abs: 0.0,
            max_intervals: 3,
        };
        let e = integrate(|x| 1.0 / libm::sqrt(x), 0.0, 1.0, &tol).unwrap_err();
        assert!(matches!(e, Error::NonConvergence { .. }));
    }

    #[test]
    fn integrand_errors_propagate() {
        let e = try_integrate(
            |_| Err::<f64, Error>(Error::ZeroDistance),
            0.0,
            1.0,
            &Tolerance::default(),
        )
        .unwrap_err();
        assert_eq!(e, Error::ZeroDistance);
    }
}
