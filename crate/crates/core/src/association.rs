//! Uplink association policies and per-user success evaluation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channel::{self, FpcAnchor, SystemParams};
pub use crate::channel::{BsRef, Tier};
use crate::error::{Error, Result};
use crate::geometry::NeighborIndex;
use crate::simulator::NetworkRealization;

/// Which base stations receive a user's uplink transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Nearest base station over both tiers.
    Single,
    /// Cell MBS plus nearest SBS.
    Double,
    /// Cell MBS plus the `k` nearest SBSs. `KPlusOne(1)` receives exactly
    /// like `Double`; `KPlusOne(0)` is MBS only.
    KPlusOne(u32),
}

impl Scheme {
    /// Number of SBSs in every serving set.
    pub fn sbs_links(&self) -> usize {
        match self {
            Scheme::Single => 0,
            Scheme::Double => 1,
            Scheme::KPlusOne(k) => *k as usize,
        }
    }

    /// SBSs the scheme must be able to reach, including the one single
    /// association compares against.
    fn sbs_needed(&self) -> usize {
        match self {
            Scheme::Single => 1,
            other => other.sbs_links(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Single => f.write_str("SA"),
            Scheme::Double => f.write_str("DA"),
            Scheme::KPlusOne(k) => write!(f, "KPLUS1({k})"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_uppercase().as_str() {
            "SA" => return Ok(Scheme::Single),
            "DA" => return Ok(Scheme::Double),
            _ => {}
        }
        let upper = t.to_ascii_uppercase();
        if let Some(inner) = upper
            .strip_prefix("KPLUS1(")
            .and_then(|r| r.strip_suffix(')'))
        {
            if let Ok(k) = inner.trim().parse::<u32>() {
                return Ok(Scheme::KPlusOne(k));
            }
        }
        Err(Error::param(
            "scheme",
            format!("unknown scheme `{s}`; expected SA, DA or KPLUS1(k)"),
        ))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <alloc::string::String as serde::Deserialize>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationOutcome {
    pub scheme: Scheme,
    pub serving_sets: Vec<Vec<BsRef>>,
    pub link_sirs: Vec<Vec<f64>>,
    pub success: Vec<bool>,
}

impl AssociationOutcome {
    pub fn successes(&self) -> usize {
        self.success.iter().filter(|&&s| s).count()
    }
}

/// A user succeeds when any of its serving links reaches the threshold.
pub fn success_indicators(outcome: &AssociationOutcome, beta_linear: f64) -> Vec<bool> {
    outcome
        .link_sirs
        .iter()
        .map(|sirs| sirs.iter().any(|&s| s >= beta_linear))
        .collect()
}

/// Lazily evaluated SIRs for one power profile, caching fading columns.
struct LinkTable<'r> {
    realization: &'r NetworkRealization,
    alpha: f64,
    tx: Vec<f64>,
    gains: BTreeMap<BsRef, Vec<f64>>,
    sirs: BTreeMap<(usize, BsRef), f64>,
}

impl<'r> LinkTable<'r> {
    fn new(realization: &'r NetworkRealization, alpha: f64, tx: Vec<f64>) -> Self {
        LinkTable {
            realization,
            alpha,
            tx,
            gains: BTreeMap::new(),
            sirs: BTreeMap::new(),
        }
    }

    fn sir(&mut self, user: usize, rx: BsRef) -> Result<f64> {
        if let Some(&s) = self.sirs.get(&(user, rx)) {
            return Ok(s);
        }
        let r = self.realization;
        let gains = self.gains.entry(rx).or_insert_with(|| r.fading.column(rx));
        let s = channel::sir_with(
            &r.window,
            r.bs_position(rx)?,
            user,
            &r.users.user_coordinates,
            &self.tx,
            gains,
            self.alpha,
        )?;
        self.sirs.insert((user, rx), s);
        Ok(s)
    }
}

/// Shared per-realization state for evaluating several schemes on the same
/// geometry and fading (common random numbers).
pub struct Associator<'r> {
    realization: &'r NetworkRealization,
    params: SystemParams,
    nearest_sbs: Vec<Vec<(usize, f64)>>,
    mbs_anchored: LinkTable<'r>,
    serving_anchored: Option<LinkTable<'r>>,
}

impl<'r> Associator<'r> {
    /// `max_sbs` is the largest number of nearest SBSs any later scheme
    /// will ask for.
    pub fn new(
        realization: &'r NetworkRealization,
        params: &SystemParams,
        max_sbs: usize,
    ) -> Result<Self> {
        params.validate()?;
        let n_sbs = realization.sbs.len();
        if max_sbs > n_sbs {
            return Err(Error::param(
                "k",
                format!(
                    "scheme needs {max_sbs} small base stations but the realization has {n_sbs}"
                ),
            ));
        }
        let nearest_sbs = if max_sbs == 0 {
            vec![Vec::new(); realization.users.len()]
        } else {
            let index = NeighborIndex::new(&realization.sbs, &realization.window);
            realization
                .users
                .user_coordinates
                .iter()
                .map(|&p| index.nearest_k(p, max_sbs))
                .collect::<Result<Vec<_>>>()?
        };
        let tx = channel::mbs_anchored_powers(realization, params)?;
        Ok(Associator {
            realization,
            params: *params,
            nearest_sbs,
            mbs_anchored: LinkTable::new(realization, params.alpha, tx),
            serving_anchored: None,
        })
    }

    fn single_serving(&self, user: usize) -> (BsRef, f64) {
        let d_mbs = self.realization.users.dist_to_mbs[user];
        match self.nearest_sbs[user].first() {
            Some(&(j, d)) if d < d_mbs => (BsRef::small_bs(j), d),
            _ => (
                BsRef::macro_bs(self.realization.users.mbs_index(user)),
                d_mbs,
            ),
        }
    }

    fn serving_set(&self, scheme: Scheme, user: usize) -> Vec<BsRef> {
        match scheme {
            Scheme::Single => vec![self.single_serving(user).0],
            other => {
                let k = other.sbs_links();
                let mut set = Vec::with_capacity(k + 1);
                set.push(BsRef::macro_bs(self.realization.users.mbs_index(user)));
                set.extend(
                    self.nearest_sbs[user][..k]
                        .iter()
                        .map(|&(j, _)| BsRef::small_bs(j)),
                );
                set
            }
        }
    }

    fn table_for(&mut self, scheme: Scheme) -> Result<&mut LinkTable<'r>> {
        if scheme == Scheme::Single && self.params.fpc_anchor == FpcAnchor::Serving {
            if self.serving_anchored.is_none() {
                let n = self.realization.users.len();
                let tx = (0..n)
                    .map(|u| channel::transmit_power(self.single_serving(u).1, &self.params))
                    .collect::<Result<Vec<_>>>()?;
                self.serving_anchored =
                    Some(LinkTable::new(self.realization, self.params.alpha, tx));
            }
            Ok(self.serving_anchored.as_mut().unwrap())
        } else {
            Ok(&mut self.mbs_anchored)
        }
    }

    pub fn outcome(&mut self, scheme: Scheme) -> Result<AssociationOutcome> {
        let available = self.nearest_sbs.first().map_or(usize::MAX, |l| l.len());
        let needed = scheme.sbs_links();
        if needed > available || (needed > 0 && self.realization.sbs.len() < needed) {
            return Err(Error::param(
                "k",
                format!("scheme {scheme} needs {needed} small base stations; {available} prepared"),
            ));
        }
        let n = self.realization.users.len();
        let beta = self.params.beta_linear();
        let serving_sets: Vec<Vec<BsRef>> = (0..n).map(|u| self.serving_set(scheme, u)).collect();
        let table = self.table_for(scheme)?;
        let mut link_sirs = Vec::with_capacity(n);
        for (u, set) in serving_sets.iter().enumerate() {
            link_sirs.push(
                set.iter()
                    .map(|&rx| table.sir(u, rx))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let mut outcome = AssociationOutcome {
            scheme,
            serving_sets,
            link_sirs,
            success: Vec::new(),
        };
        outcome.success = success_indicators(&outcome, beta);
        Ok(outcome)
    }
}

/// Evaluates `scheme` on a realization.
pub fn associate(
    scheme: Scheme,
    realization: &NetworkRealization,
    params: &SystemParams,
) -> Result<AssociationOutcome> {
    let need = if realization.sbs.is_empty() && scheme == Scheme::Single {
        0
    } else {
        scheme.sbs_needed()
    };
    Associator::new(realization, params, need)?.outcome(scheme)
}
