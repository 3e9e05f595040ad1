//! Facility location on the unit interval under the envy-ratio objective.
//!
//! The crate is split into four layers:
//!
//! - the objective itself ([`LocationProfile`], [`PlacementDistribution`],
//!   [`envy_ratio`], [`approximation_ratio`]) and the optimal midpoint
//!   placement;
//! - [`mechanisms`]: the seven strategyproof mechanisms, each returning an
//!   explicit finite distribution over facility locations;
//! - [`analysis`]: closed-form consistency/robustness guarantees;
//! - [`verify`]: brute-force adversarial search that confronts every closed
//!   form with an empirical worst case.
//!
//! All functions are pure; values are immutable once constructed.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > y)` deliberately treats NaN as failure

pub mod analysis;
mod distribution;
mod error;
pub mod mechanisms;
mod objective;
mod profile;
mod ratio;
pub mod verify;

pub use distribution::{sample, PlacementDistribution, PROBABILITY_TOLERANCE};
pub use error::{Error, Result};
pub use mechanisms::MechanismSpec;
pub use objective::{
    approximation_ratio, envy_ratio, expected_envy_ratio, expected_utility, optimal_envy_ratio,
    optimal_location, utility,
};
pub use profile::{rescale, Interval, LocationProfile, Prediction};
pub use ratio::ExtendedRatio;
