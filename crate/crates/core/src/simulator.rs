//! Monte Carlo engine.
//!
//! Each realization is drawn from its own stream seeded by
//! `(point seed, index)`, and every requested scheme is evaluated on the same
//! geometry and fading. Confidence intervals are batch means over
//! realizations. The point seed depends only on the run seed, the two
//! densities and the window side, so every other parameter value at one
//! density sees identical networks.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::association::{Associator, Scheme};
use crate::channel::{BsRef, FadingField, SystemParams, Tier};
use crate::error::{Error, Result};
use crate::geometry::{place_users, sample_ppp, Point, PointSet, UserPlacement, Window};
use crate::math;
use crate::seed;

/// 95% two-sided normal quantile.
pub const Z95: f64 = 1.96;

/// One sampled deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub window: Window,
    pub mbs: PointSet,
    pub sbs: PointSet,
    pub users: UserPlacement,
    pub fading: FadingField,
    /// Draws discarded because they contained no MBS.
    pub mbs_resamples: u32,
}

impl NetworkRealization {
    pub fn sample<R: Rng + ?Sized>(
        params: &SystemParams,
        window: &Window,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate()?;
        let mut mbs_resamples = 0;
        let mbs = loop {
            let set = sample_ppp(params.lambda_mbs, window, rng)?;
            if !set.is_empty() {
                break set;
            }
            mbs_resamples += 1;
        };
        let sbs = if params.lambda_sbs > 0.0 {
            sample_ppp(params.lambda_sbs, window, rng)?
        } else {
            PointSet::empty()
        };
        let users = place_users(&mbs, window, rng)?;
        let fading = FadingField::new(rng.next_u64(), users.len());
        Ok(NetworkRealization {
            window: *window,
            mbs,
            sbs,
            users,
            fading,
            mbs_resamples,
        })
    }

    pub fn bs_position(&self, rx: BsRef) -> Result<Point> {
        let set = match rx.tier {
            Tier::Macro => &self.mbs,
            Tier::Small => &self.sbs,
        };
        set.points
            .get(rx.index)
            .copied()
            .ok_or_else(|| Error::param("receiver", format!("no base station {rx:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub successes: usize,
    pub users: usize,
    pub success_fraction: f64,
    /// Successful users per unit area times the threshold rate.
    pub ase_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome {
    pub per_scheme: Vec<SchemeResult>,
    pub mbs_resamples: u32,
}

/// Samples one realization and evaluates every scheme on it.
pub fn run_realization<R: Rng + ?Sized>(
    params: &SystemParams,
    window: &Window,
    schemes: &[Scheme],
    rng: &mut R,
) -> Result<RealizationOutcome> {
    let realization = NetworkRealization::sample(params, window, rng)?;
    evaluate_realization(&realization, params, schemes)
}

pub fn evaluate_realization(
    realization: &NetworkRealization,
    params: &SystemParams,
    schemes: &[Scheme],
) -> Result<RealizationOutcome> {
    let n_sbs = realization.sbs.len();
    let max_sbs = schemes
        .iter()
        .map(|s| match s {
            Scheme::Single => n_sbs.min(1),
            other => other.sbs_links(),
        })
        .max()
        .unwrap_or(0);
    let mut associator = Associator::new(realization, params, max_sbs)?;
    let rate = params.rate();
    let area = realization.window.area();
    let per_scheme = schemes
        .iter()
        .map(|&scheme| {
            let o = associator.outcome(scheme)?;
            let successes = o.successes();
            let users = o.success.len();
            Ok(SchemeResult {
                scheme,
                successes,
                users,
                success_fraction: successes as f64 / users as f64,
                ase_density: successes as f64 / area * rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RealizationOutcome {
        per_scheme,
        mbs_resamples: realization.mbs_resamples,
    })
}

/// Maps realization indices to results. Implementations may run in parallel
/// but must return results in index order.
pub trait Executor {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub window_side: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            window_side: Window::DEFAULT_SIDE,
            n_realizations: 2000,
            seed: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<Window> {
        if self.n_realizations < 2 {
            return Err(Error::param(
                "n_realizations",
                "at least 2 realizations are needed for a confidence interval",
            ));
        }
        Window::new(self.window_side)
    }
}

/// Seed shared by every scheme and every non-geometric parameter value at
/// one (density, window) point.
pub fn point_seed(seed: u64, params: &SystemParams, window_side: f64) -> u64 {
    seed::combine(
        seed,
        &[
            params.lambda_mbs.to_bits(),
            params.lambda_sbs.to_bits(),
            window_side.to_bits(),
        ],
    )
}

/// Runs all realizations of one parameter point.
pub fn run_point<E: Executor>(
    params: &SystemParams,
    schemes: &[Scheme],
    cfg: &SimConfig,
    exec: &E,
) -> Result<Vec<RealizationOutcome>> {
    params.validate()?;
    let window = cfg.validate()?;
    let base = point_seed(cfg.seed, params, cfg.window_side);
    exec.map(cfg.n_realizations, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::realization_seed(base, i as u64));
        run_realization(params, &window, schemes, &mut rng)
    })
    .into_iter()
    .collect()
}

/// Monte Carlo estimate with a 95% batch-means confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateWithCI {
    pub value: f64,
    pub ci_half_width: f64,
    pub n_realizations: usize,
    pub n_user_samples: usize,
    pub mbs_resamples: u64,
}

impl EstimateWithCI {
    /// Batch means over per-realization values.
    pub fn from_batches(values: &[f64], n_user_samples: usize, mbs_resamples: u64) -> Self {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if n > 1 {
            pairwise_sum(&dev) / (n - 1) as f64
        } else {
            0.0
        };
        EstimateWithCI {
            value: mean,
            ci_half_width: Z95 * math::sqrt(var / n as f64),
            n_realizations: n,
            n_user_samples,
            mbs_resamples,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EstimateWithCI {
            value: self.value * factor,
            ci_half_width: self.ci_half_width * factor,
            ..*self
        }
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Success-probability estimate of `scheme` from realizations produced by
/// [`run_point`].
pub fn summarize(runs: &[RealizationOutcome], scheme: Scheme) -> Result<EstimateWithCI> {
    let mut fractions = Vec::with_capacity(runs.len());
    let mut users = 0;
    let mut resamples = 0u64;
    for r in runs {
        let s = r
            .per_scheme
            .iter()
            .find(|s| s.scheme == scheme)
            .ok_or_else(|| Error::param("scheme", format!("{scheme} was not simulated")))?;
        fractions.push(s.success_fraction);
        users += s.users;
        resamples += r.mbs_resamples as u64;
    }
    Ok(EstimateWithCI::from_batches(&fractions, users, resamples))
}

pub fn estimate_with<E: Executor>(
    params: &SystemParams,
    scheme: Scheme,
    cfg: &SimConfig,
    exec: &E,
) -> Result<EstimateWithCI> {
    summarize(&run_point(params, &[scheme], cfg, exec)?, scheme)
}

/// Success probability of `scheme`.
pub fn estimate(params: &SystemParams, scheme: Scheme, cfg: &SimConfig) -> Result<EstimateWithCI> {
    estimate_with(params, scheme, cfg, &Sequential)
}

/// Area spectral efficiency `lambda * p_s * log2(1 + beta)`.
pub fn estimate_ase(
    params: &SystemParams,
    scheme: Scheme,
    cfg: &SimConfig,
) -> Result<EstimateWithCI> {
    Ok(estimate(params, scheme, cfg)?.scaled(ase_factor(params)))
}

pub fn ase_factor(params: &SystemParams) -> f64 {
    params.lambda_mbs * params.rate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Epsilon,
    LambdaSbs,
    /// Additional SBS associations; the point evaluates `KPlusOne(k)`.
    K,
    /// Threshold in dB.
    Beta,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::LambdaSbs => "lambda_sbs",
            SweepAxis::K => "k",
            SweepAxis::Beta => "beta",
        }
    }

    /// `base` with this axis set to `value`, validated.
    pub fn apply(&self, base: &SystemParams, value: f64) -> Result<SystemParams> {
        let mut p = *base;
        match self {
            SweepAxis::Epsilon => p.epsilon = value,
            SweepAxis::LambdaSbs => p.lambda_sbs = value,
            SweepAxis::Beta => p.beta_db = value,
            SweepAxis::K => {
                self.k_of(value)?;
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn k_of(&self, value: f64) -> Result<u32> {
        if !(value >= 0.0 && value <= u32::MAX as f64 && math::floor(value) == value) {
            return Err(Error::param("k", "must be a non-negative integer"));
        }
        Ok(value as u32)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "epsilon" => Ok(SweepAxis::Epsilon),
            "lambda_sbs" => Ok(SweepAxis::LambdaSbs),
            "k" => Ok(SweepAxis::K),
            "beta" => Ok(SweepAxis::Beta),
            other => Err(Error::param(
                "axis",
                format!("unknown sweep axis `{other}`; expected epsilon, lambda_sbs, k or beta"),
            )),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for SweepAxis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for SweepAxis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <alloc::string::String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Source {
    Sim,
    Analytic,
    ClosedForm,
}

/// One row of a result table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurvePoint {
    pub scheme: Scheme,
    pub axis_name: SweepAxis,
    pub axis_value: f64,
    pub beta_db: f64,
    pub epsilon: f64,
    pub lambda_sbs: f64,
    pub p_max_dbm: f64,
    pub source: Source,
    pub p_success: f64,
    /// Confidence half-width for simulated rows; quadrature error bound for
    /// analytic rows; zero for closed-form rows.
    pub ci_half_width: f64,
    pub ase: f64,
    pub n_realizations: u64,
    pub seed: u64,
}

impl CurvePoint {
    pub fn simulated(
        scheme: Scheme,
        axis: SweepAxis,
        axis_value: f64,
        params: &SystemParams,
        est: &EstimateWithCI,
        seed: u64,
    ) -> Self {
        CurvePoint {
            scheme,
            axis_name: axis,
            axis_value,
            beta_db: params.beta_db,
            epsilon: params.epsilon,
            lambda_sbs: params.lambda_sbs,
            p_max_dbm: params.p_max_dbm,
            source: Source::Sim,
            p_success: est.value,
            ci_half_width: est.ci_half_width,
            ase: est.value * ase_factor(params),
            n_realizations: est.n_realizations as u64,
            seed,
        }
    }
}

/// Simulated curve points for every `(scheme, value)` pair, in value-major
/// order. On the `k` axis each value evaluates `KPlusOne(k)` and `schemes` is
/// ignored; all `k` share one set of realizations.
pub fn sweep<E: Executor>(
    base: &SystemParams,
    axis: SweepAxis,
    values: &[f64],
    schemes: &[Scheme],
    cfg: &SimConfig,
    exec: &E,
) -> Result<Vec<CurvePoint>> {
    if values.is_empty() {
        return Err(Error::param(
            "sweep.values",
            "at least one value is required",
        ));
    }
    let mut points = Vec::new();
    let mut resolved = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let p = axis.apply(base, v).map_err(|e| {
            Error::param(
                "sweep.values",
                format!("entry {i} ({v}) is invalid for axis {axis}: {e}"),
            )
        })?;
        resolved.push(p);
    }

    if axis == SweepAxis::K {
        let ks: Vec<Scheme> = values
            .iter()
            .map(|&v| axis.k_of(v).map(Scheme::KPlusOne))
            .collect::<Result<_>>()?;
        let runs = run_point(base, &ks, cfg, exec)?;
        let pseed = point_seed(cfg.seed, base, cfg.window_side);
        for (&v, &scheme) in values.iter().zip(&ks) {
            let est = summarize(&runs, scheme)?;
            points.push(CurvePoint::simulated(scheme, axis, v, base, &est, pseed));
        }
        return Ok(points);
    }

    if schemes.is_empty() {
        return Err(Error::param("schemes", "at least one scheme is required"));
    }
    for (&v, p) in values.iter().zip(&resolved) {
        let runs = run_point(p, schemes, cfg, exec)?;
        let pseed = point_seed(cfg.seed, p, cfg.window_side);
        for &scheme in schemes {
            let est = summarize(&runs, scheme)?;
            points.push(CurvePoint::simulated(scheme, axis, v, p, &est, pseed));
        }
    }
    Ok(points)
}
