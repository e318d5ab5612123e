//! Special-function kernel used by the channel and outage models.
//!
//! All functions are pure; the Bessel and incomplete-gamma routines pick
//! an evaluation strategy by argument range (switch points are module
//! constants in [`bessel`] and [`gamma`]).

pub mod bessel;
pub mod gamma;
pub mod marcum;

pub use bessel::{bessel_i0, bessel_i0_scaled, bessel_j, bessel_k, ln_bessel_k_seq};
pub use gamma::{
    factorial, gamma, ln_binomial, ln_factorial, ln_gamma, log_add_exp, pochhammer, regularized_lower_gamma,
    regularized_upper_gamma, upper_gamma_int,
};
pub use marcum::{marcum_q1, marcum_q1_truncated, MarcumTruncation};
