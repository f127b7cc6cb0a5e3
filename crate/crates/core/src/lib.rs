//! System identification by matching invariant measures in time-delay
//! coordinates.
//!
//! The crate is organised in layers:
//!
//! - [`dynamics`]: torus rotations, Lorenz-63 and Kuramoto–Sivashinsky models
//!   behind the [`dynamics::DynamicalModel`] trait.
//! - [`measure`]: time series, observables, delay embeddings, empirical
//!   measures and pushforwards.
//! - [`metrics`]: energy-distance MMD and (sliced) Wasserstein distances.
//! - [`identify`]: trajectory- and pushforward-based objectives, Nelder–Mead
//!   and landscape scans.
//! - [`cli`]: JSON-configured experiment runner.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod identify;
pub mod measure;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
