//! Acceptance-probability estimation: exact by full enumeration, and
//! set-based by counting accepted elements of a hitting set, plus the
//! discrepancy between a set's empirical measure of a property and the
//! property's true density. All arithmetic is exact rational.

use crate::circuits::BooleanCircuit;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::hitting::{HittingSet, Provenance};
use crate::properties::{density, Property};
use crate::Rat;

/// How an acceptance estimate was obtained.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EstimateMethod {
    Exact,
    SetBased(Provenance),
}

/// An acceptance-probability estimate in [0,1].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CappEstimate {
    pub value: Rat,
    pub method: EstimateMethod,
}

/// Exact fraction of inputs the circuit accepts, by full enumeration.
pub fn exact_acceptance(circuit: &BooleanCircuit, limits: &Limits) -> Result<Rat> {
    let arity = circuit.arity();
    if arity > limits.max_truth_table_arity {
        return Err(Error::limit(format!(
            "exact acceptance enumerates 2^{arity} inputs, above the 2^{} cap",
            limits.max_truth_table_arity
        )));
    }
    let accepted = circuit.accepted_inputs();
    Ok(Rat::new(accepted as i128, 1i128 << arity))
}

/// Fraction of hitting-set elements the circuit accepts, with multiset
/// counting. Elements longer than the circuit's arity are read by their
/// leftmost bits; shorter elements are an input-shape error.
pub fn capp_estimate(circuit: &BooleanCircuit, h: &HittingSet) -> Result<CappEstimate> {
    let arity = circuit.arity();
    if h.n() < arity {
        return Err(Error::input(format!(
            "set elements have length {}, circuit needs at least {arity}",
            h.n()
        )));
    }
    let mut accepted = 0i128;
    for e in h.iter() {
        let input = e.left(arity)?;
        if circuit.eval(&input)? {
            accepted += 1;
        }
    }
    Ok(CappEstimate {
        value: Rat::new(accepted, h.len() as i128),
        method: EstimateMethod::SetBased(h.provenance()),
    })
}

/// Exact absolute difference between the property's true density at
/// length n and the fraction of set elements in the property.
pub fn discrepancy(h: &HittingSet, q: &dyn Property, n: usize, limits: &Limits) -> Result<Rat> {
    if h.n() != n {
        return Err(Error::input(format!(
            "set elements have length {}, discrepancy requested at length {n}",
            h.n()
        )));
    }
    let true_density = density(q, n, limits)?;
    let hits = q.contains_batch(h.elements())?.iter().filter(|&&b| b).count();
    let measured = Rat::new(hits as i128, h.len() as i128);
    let diff = true_density - measured;
    Ok(if diff < Rat::new(0, 1) { -diff } else { diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::circuits::{Gate, GateOp};
    use crate::hitting::Provenance;
    use crate::properties::{AllStrings, Primes};

    fn and2() -> BooleanCircuit {
        BooleanCircuit::new(2, vec![Gate { op: GateOp::And, left: 0, right: 1 }], 4).unwrap()
    }

    #[test]
    fn exact_acceptance_basics() {
        let limits = Limits::default();
        let one = BooleanCircuit::constant(3, true).unwrap();
        assert_eq!(exact_acceptance(&one, &limits).unwrap(), Rat::new(1, 1));
        assert_eq!(exact_acceptance(&and2(), &limits).unwrap(), Rat::new(1, 4));
        // Majority of three accepts exactly half the inputs.
        let maj = BooleanCircuit::new(
            3,
            vec![
                Gate { op: GateOp::And, left: 0, right: 1 },
                Gate { op: GateOp::Or, left: 0, right: 1 },
                Gate { op: GateOp::And, left: 2, right: 6 },
                Gate { op: GateOp::Or, left: 5, right: 7 },
            ],
            8,
        )
        .unwrap();
        assert_eq!(exact_acceptance(&maj, &limits).unwrap(), Rat::new(1, 2));
    }

    #[test]
    fn block_path_matches_scalar_enumeration() {
        // Arity 8 exercises the 64-inputs-per-word path; cross-check the
        // count against one-at-a-time evaluation.
        let limits = Limits::default();
        let c = BooleanCircuit::new(
            8,
            vec![
                Gate { op: GateOp::Xor, left: 0, right: 7 },
                Gate { op: GateOp::Nand, left: 3, right: 10 },
                Gate { op: GateOp::OrNot, left: 11, right: 5 },
            ],
            12,
        )
        .unwrap();
        let mut accepted = 0i128;
        for v in 0..1u64 << 8 {
            if c.eval(&BitString::from_value(v, 8)).unwrap() {
                accepted += 1;
            }
        }
        assert_eq!(exact_acceptance(&c, &limits).unwrap(), Rat::new(accepted, 256));
    }

    #[test]
    fn full_cube_estimate_is_exact() {
        let limits = Limits::default();
        let h = HittingSet::full_cube(2).unwrap();
        let est = capp_estimate(&and2(), &h).unwrap();
        assert_eq!(est.value, exact_acceptance(&and2(), &limits).unwrap());
        assert_eq!(est.method, EstimateMethod::SetBased(Provenance::File));
    }

    #[test]
    fn longer_elements_are_read_by_prefix() {
        // Elements of length 4 against a 2-ary AND: only prefixes 11 count.
        let elems = vec![
            "1100".parse().unwrap(),
            "1111".parse().unwrap(),
            "0111".parse().unwrap(),
            "1011".parse().unwrap(),
        ];
        let h = HittingSet::new(4, elems, Provenance::File).unwrap();
        let est = capp_estimate(&and2(), &h).unwrap();
        assert_eq!(est.value, Rat::new(2, 4));
        // The other direction errors.
        let short = HittingSet::new(1, vec!["1".parse().unwrap()], Provenance::File).unwrap();
        assert!(matches!(capp_estimate(&and2(), &short), Err(Error::InputShape(_))));
    }

    #[test]
    fn discrepancy_examples() {
        let limits = Limits::default();
        // Full cube: measures coincide for any property.
        let h = HittingSet::full_cube(4).unwrap();
        assert_eq!(discrepancy(&h, &Primes, 4, &limits).unwrap(), Rat::new(0, 1));
        // All-strings property: both measures are 1 for any set.
        let single = HittingSet::new(4, vec!["1111".parse().unwrap()], Provenance::File).unwrap();
        assert_eq!(discrepancy(&single, &AllStrings, 4, &limits).unwrap(), Rat::new(0, 1));
        // {1111}: 15 is composite, and [8,15] holds the primes 11 and 13.
        assert_eq!(discrepancy(&single, &Primes, 4, &limits).unwrap(), Rat::new(2, 16));
    }

    #[test]
    fn constant_zero_accepts_nothing_on_any_set() {
        let h = HittingSet::full_cube(3).unwrap();
        let zero = BooleanCircuit::constant(3, false).unwrap();
        let est = capp_estimate(&zero, &h).unwrap();
        assert_eq!(est.value, Rat::new(0, 1));
    }
}
