//! Reliability evaluation and reliable routing in interdependent networks.
//!
//! Demand nodes of a routed network depend on supply nodes of a supporting
//! network and fail once all of their supplies fail. This crate estimates
//! and bounds the failure probability of paths and path pairs, and computes
//! reliable paths and diverse path pairs, with an exhaustive oracle as the
//! reference for everything.

pub mod error;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod sampler;
pub mod analytic;
pub mod routing;
pub mod optimize;
pub mod scenario;
pub mod experiment;
pub mod cli;

pub use error::{Error, Result};
