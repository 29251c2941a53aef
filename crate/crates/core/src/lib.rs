//! Uplink channel estimation under pilot spoofing: array and channel model,
//! estimators, closed-form error expressions and a seeded Monte Carlo
//! harness.

pub mod array_channel;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};
