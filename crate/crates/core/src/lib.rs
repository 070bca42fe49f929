//! Stochastic-geometry engine for uplink reliability in dense heterogeneous
//! cellular networks.
//!
//! The crate models macro base stations (MBS) and small base stations (SBS)
//! as independent Poisson point processes on a toroidal square window, drops
//! one uplink user uniformly inside every macro Voronoi cell and evaluates
//! three uplink association policies under fractional power control:
//!
//! - single association ([`Scheme::Single`]): the user is received only by
//!   the nearest base station of either tier;
//! - double association ([`Scheme::Double`]): the cell MBS and the nearest
//!   SBS both receive the transmission;
//! - (k+1)-association ([`Scheme::KPlusOne`]): the cell MBS plus the `k`
//!   nearest SBSs.
//!
//! [`simulator`] estimates success probability and area spectral efficiency
//! by Monte Carlo with common random numbers across schemes; [`analytic`]
//! evaluates the Laplace-functional lower bound for double association by
//! nested adaptive quadrature, together with its closed form for `alpha = 4`,
//! `epsilon = 0`.
//!
//! The crate is `no_std` and only needs `alloc`. The `hetnet` companion
//! crate adds parallel execution and the command line.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod association;
pub mod channel;
pub mod error;
pub mod geometry;
mod math;
pub mod quadrature;
pub mod seed;
pub mod simulator;

pub use analytic::{closed_form_da, AnalyticModel, AnalyticParams, Branch};
pub use association::{associate, success_indicators, AssociationOutcome, BsRef, Scheme, Tier};
pub use channel::{FadingField, FpcAnchor, SystemParams};
pub use error::{Error, Result};
pub use geometry::{place_users, sample_ppp, Point, PointSet, UserPlacement, Window};
pub use quadrature::QuadratureResult;
pub use simulator::{
    estimate, estimate_ase, run_realization, sweep, CurvePoint, EstimateWithCI, Executor,
    NetworkRealization, Sequential, SimConfig, Source, SweepAxis,
};
