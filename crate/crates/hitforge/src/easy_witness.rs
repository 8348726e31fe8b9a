//! Hitting sets from the truth tables of all small circuits.
//!
//! For a target length n, every function on ⌈log₂ n⌉ inputs computable
//! within a gate bound contributes the leftmost n bits of its truth table.
//! The result is deduplicated and sorted, so the first member found in a
//! property is canonical. At full coverage (every function within the
//! bound) the set is the whole cube and the first member in Q is the
//! lexicographically least element of Q_n.

use crate::bits::{left_n, BitString};
use crate::circuits::gate_bounded_functions;
use crate::config::Limits;
use crate::constructor::first_member;
use crate::error::{Error, Result};
use crate::hitting::{HittingSet, Provenance};
use crate::properties::Property;

/// The circuit arity used for length n: enough inputs that truth tables
/// are at least n bits long, and never fewer than one.
pub fn arity_for_length(n: usize) -> usize {
    let mut arity = 0usize;
    while (1usize << arity) < n {
        arity += 1;
    }
    arity.max(1)
}

/// Truncated truth tables of every function on `arity_for_length(n)`
/// inputs computable with at most `s` gates, deduplicated and sorted.
pub fn build_easy_hitting_set(n: usize, s: usize, limits: &Limits) -> Result<HittingSet> {
    if n == 0 {
        return Err(Error::input("target length must be at least 1"));
    }
    let arity = arity_for_length(n);
    let functions = gate_bounded_functions(arity, s, limits)?;
    let mut elements = Vec::with_capacity(functions.len());
    for tt in &functions {
        elements.push(left_n(tt.bits(), n)?);
    }
    elements.sort();
    elements.dedup();
    HittingSet::new(n, elements, Provenance::Easy)
}

/// The lexicographically first element of H that lies in Q, or None.
/// Identical to the constructor's canonical-member scan; exposed here so
/// hitting sets can be checked directly against a property.
pub fn verify_hitting(h: &HittingSet, q: &dyn Property) -> Result<Option<BitString>> {
    first_member(h, q)
}
