//! Map-anchored visual-inertial localization filters with a simulation and
//! evaluation harness.
//!
//! The crate provides:
//! - closed-form Lie group operations for the pose groups carrying the state
//!   ([`liegroup`]),
//! - the partitioned filter state with right-invariant error charts
//!   ([`state`]),
//! - IMU mean and covariance propagation ([`propagation`]),
//! - observation models, Schmidt updates and the observability-constrained
//!   projection ([`measurement`]),
//! - numerical observability analysis of all system/parameterization
//!   combinations ([`observability`]),
//! - a deterministic spline-based simulator ([`simulator`]),
//! - trajectory metrics (RMSE / ATE / RPE / NEES) ([`metrics`]),
//! - the Monte Carlo experiment runner and file formats ([`experiment`],
//!   [`io`]).

pub mod error;
pub mod liegroup;
pub mod propagation;
pub mod state;

pub use error::{Error, Result};
pub use liegroup::{GroupElement, Rot3, TangentVector};
