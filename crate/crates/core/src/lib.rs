//! Well-balanced, entropy-stable finite-volume schemes for the Euler
//! equations with a gravitational potential.

// `!(x <= tol)` is used deliberately so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod equilibrium;
pub mod error;
pub mod euler;
pub mod fv1d;
pub mod fv2d;
pub mod harness;
pub mod highorder;
pub mod oracle;
pub mod potential;
pub mod properties;
pub mod quadrature;
pub mod riemann;
pub mod sim1d;

pub use error::{Error, Result};
