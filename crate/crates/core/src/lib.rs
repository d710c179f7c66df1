//! Single-particle engine fuelled by generalized position measurements.
//!
//! A particle sits in a linear potential `V(u) = u` bounded by a hard wall.
//! A two-outcome measurement asks whether it is near the wall; when it is
//! not, the wall is advanced for free and the particle relaxes to the raised
//! ground state. Lengths are in units of `x0`, energies in units of
//! `hbar^2 / (2 m x0^2)` throughout.

// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod measurement;
pub mod meter;
pub mod numerics;
pub mod scenarios;
pub mod sweep;
pub mod trap;

pub use error::{Error, Result};
