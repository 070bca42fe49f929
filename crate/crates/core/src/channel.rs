//! Uplink SIR under fractional power control with Rayleigh fading.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::math;
use crate::seed;
use crate::simulator::NetworkRealization;

/// Power-control anchor used by single association.
///
/// `Mbs` (default) has every user control power against its own cell MBS in
/// every scheme, so all schemes share one interference field. `Serving`
/// lets single-association users that are served by an SBS control power
/// against that SBS instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FpcAnchor {
    #[default]
    Mbs,
    Serving,
}

/// Model constants. Powers are configured in dBm and the threshold in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SystemParams {
    /// MBS density, also the density of active uplink users.
    pub lambda_mbs: f64,
    pub lambda_sbs: f64,
    /// Path-loss exponent, strictly above 2.
    pub alpha: f64,
    /// Power-control factor in `[0, 1]`.
    pub epsilon: f64,
    pub p_default_dbm: f64,
    pub p_max_dbm: f64,
    pub beta_db: f64,
    pub fpc_anchor: FpcAnchor,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            lambda_mbs: 0.01,
            lambda_sbs: 0.02,
            alpha: 4.0,
            epsilon: 0.0,
            p_default_dbm: 30.0,
            p_max_dbm: 50.0,
            beta_db: 0.0,
            fpc_anchor: FpcAnchor::Mbs,
        }
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    math::powf(10.0, dbm / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    math::powf(10.0, db / 10.0)
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_mbs.is_finite() && self.lambda_mbs > 0.0) {
            return Err(Error::param("lambda_mbs", "must be positive and finite"));
        }
        if !(self.lambda_sbs.is_finite() && self.lambda_sbs >= 0.0) {
            return Err(Error::param(
                "lambda_sbs",
                "must be non-negative and finite",
            ));
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(Error::param("alpha", "path-loss exponent must exceed 2"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param(
                "epsilon",
                "power-control factor must lie in [0, 1]",
            ));
        }
        if !self.p_default_dbm.is_finite() || !self.p_max_dbm.is_finite() {
            return Err(Error::param("p_default_dbm", "powers must be finite"));
        }
        if self.p_max_dbm < self.p_default_dbm {
            return Err(Error::param(
                "p_max_dbm",
                "maximum power must be at least the default power",
            ));
        }
        if !self.beta_db.is_finite() {
            return Err(Error::param("beta_db", "threshold must be finite"));
        }
        Ok(())
    }

    pub fn p_default_mw(&self) -> f64 {
        dbm_to_mw(self.p_default_dbm)
    }

    pub fn p_max_mw(&self) -> f64 {
        dbm_to_mw(self.p_max_dbm)
    }

    /// Ratio of the power cap to the default power, always `>= 1`.
    pub fn p_hat(&self) -> f64 {
        db_to_linear(self.p_max_dbm - self.p_default_dbm)
    }

    pub fn beta_linear(&self) -> f64 {
        db_to_linear(self.beta_db)
    }

    /// Shannon rate at the threshold over unit bandwidth, `log2(1 + beta)`.
    pub fn rate(&self) -> f64 {
        math::log2(1.0 + self.beta_linear())
    }
}

/// Transmit power in mW under fractional power control with a cap:
/// `min(r^(alpha*epsilon) * P, P_max)`.
pub fn transmit_power(r_to_mbs: f64, params: &SystemParams) -> Result<f64> {
    if !(r_to_mbs >= 0.0) {
        return Err(Error::param("r_to_mbs", "distance must be non-negative"));
    }
    let p = params.p_default_mw();
    if params.epsilon == 0.0 {
        return Ok(p);
    }
    let controlled = math::powf(r_to_mbs, params.alpha * params.epsilon) * p;
    Ok(controlled.min(params.p_max_mw()))
}

/// `gain * distance^-alpha * tx_power`.
pub fn received_power(gain: f64, link_distance: f64, tx_power: f64, alpha: f64) -> Result<f64> {
    if link_distance == 0.0 {
        return Err(Error::ZeroDistance);
    }
    if !(gain > 0.0) || !(link_distance > 0.0) || !(tx_power > 0.0) {
        return Err(Error::param(
            "received_power",
            "gain, distance and power must be positive",
        ));
    }
    Ok(gain * math::path_loss(link_distance, alpha) * tx_power)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Tier {
    Macro,
    Small,
}

/// A receiving base station: tier plus index into that tier's point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BsRef {
    pub tier: Tier,
    pub index: usize,
}

impl BsRef {
    pub const fn macro_bs(index: usize) -> Self {
        BsRef {
            tier: Tier::Macro,
            index,
        }
    }

    pub const fn small_bs(index: usize) -> Self {
        BsRef {
            tier: Tier::Small,
            index,
        }
    }
}

/// Rayleigh power gains, Exp(1), for every (user, receiver) pair.
///
/// Gains towards one receiver are drawn as a column from a stream keyed by
/// that receiver, so any subset of links can be materialised in any order
/// and always yields the same values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FadingField {
    pub seed: u64,
    pub n_users: usize,
}

impl FadingField {
    pub fn new(seed: u64, n_users: usize) -> Self {
        FadingField { seed, n_users }
    }

    pub fn column(&self, rx: BsRef) -> Vec<f64> {
        let tier = match rx.tier {
            Tier::Macro => 1u64,
            Tier::Small => 2u64,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed::combine(self.seed, &[tier, rx.index as u64]));
        (0..self.n_users)
            .map(|_| {
                let g: f64 = Exp1.sample(&mut rng);
                // Exp1 can return exactly 0 with negligible probability
                if g > 0.0 {
                    g
                } else {
                    f64::MIN_POSITIVE
                }
            })
            .collect()
    }

    pub fn gain(&self, user: usize, rx: BsRef) -> f64 {
        self.column(rx)[user]
    }
}

/// SIR of `serving` at a receiver located at `rx`, every other user
/// interfering with its own gain and transmit power. Infinite when nobody
/// else transmits.
pub fn sir_with(
    window: &Window,
    rx: Point,
    serving: usize,
    users: &[Point],
    tx_power: &[f64],
    gains: &[f64],
    alpha: f64,
) -> Result<f64> {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (u, &p) in users.iter().enumerate() {
        let d = window.distance(p, rx);
        let rp = received_power(gains[u], d, tx_power[u], alpha)?;
        if u == serving {
            signal = rp;
        } else {
            interference += rp;
        }
    }
    if interference == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(signal / interference)
    }
}

/// Transmit powers of all users with power control anchored at their own
/// cell MBS.
pub fn mbs_anchored_powers(
    realization: &NetworkRealization,
    params: &SystemParams,
) -> Result<Vec<f64>> {
    realization
        .users
        .dist_to_mbs
        .iter()
        .map(|&r| transmit_power(r, params))
        .collect()
}

/// SIR of `serving_user` at base station `rx` in a realization, all users
/// power-controlling towards their own MBS.
pub fn sir_at(
    rx: BsRef,
    serving_user: usize,
    realization: &NetworkRealization,
    params: &SystemParams,
) -> Result<f64> {
    if serving_user >= realization.users.len() {
        return Err(Error::param("serving_user", "no such user"));
    }
    let tx = mbs_anchored_powers(realization, params)?;
    let gains = realization.fading.column(rx);
    sir_with(
        &realization.window,
        realization.bs_position(rx)?,
        serving_user,
        &realization.users.user_coordinates,
        &tx,
        &gains,
        params.alpha,
    )
}
