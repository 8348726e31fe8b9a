//! Hitting-set generators, canonical constructors, and acceptance-probability
//! estimation at desk scale.
//!
//! The crate centers on three kinds of objects:
//!
//! * **hitting sets** — explicit lists of n-bit strings guaranteed to
//!   intersect every sufficiently dense set recognized by a small circuit,
//!   built either from the truth tables of all small circuits
//!   ([`circuits::gate_bounded_functions`]) or by stretching a hard truth
//!   table through a combinatorial design;
//! * **canonical constructors** — algorithms that, given a property and a
//!   target length, return the same distinguished member of the property on
//!   every run, independent of random choices;
//! * **acceptance estimators** — exact and hitting-set-based estimates of
//!   the fraction of inputs a circuit accepts.
//!
//! Everything is sized for interactive experimentation: truth tables up to
//! arity 24, exhaustive circuit searches up to arity 4, and explicit
//! enumeration everywhere a closed form is not available.  Each public
//! construction has a deliberately naive counterpart in the test suite that
//! recomputes the same object by brute force.

pub mod bits;
pub mod capp;
pub mod circuits;
pub mod config;
pub mod constructor;
pub mod easy_witness;
pub mod error;
pub mod experiment;
pub mod hitting;
pub mod nwgen;
pub mod properties;
pub mod sampler;

pub use bits::BitString;
pub use config::Limits;
pub use error::{Error, Result};

/// Exact rational number used for every density, acceptance fraction, and
/// discrepancy in the crate; no floating point anywhere in the results.
pub type Rat = num_rational::Ratio<i128>;
