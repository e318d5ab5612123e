//! Outage analysis for hybrid satellite-terrestrial networks in which a GEO
//! satellite reaches a ground user through one of `M` amplify-and-forward
//! UAV relays, with aggregate transceiver impairments on every node.
//!
//! The outage probability is available three ways:
//!
//! * [`outage::op_exact`]: closed-form finite sums with a Bessel-K kernel,
//!   leaving only a one-dimensional distance average to quadrature.
//! * [`outage::op_numeric`]: brute-force nested quadrature of the outage
//!   integral, built from the exact per-hop densities.
//! * [`mcsim::estimate_outage`]: seeded Monte Carlo over fading and UAV
//!   placement draws.
//!
//! [`outage::op_asymptotic`] gives the high-SNR form used for diversity
//! analysis.

// `!(x > 0.0)` also rejects NaN, which is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod linkbudget;
pub mod mcsim;
pub mod mobility;
pub mod outage;
pub mod quad;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};

/// Converts a decibel value to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
