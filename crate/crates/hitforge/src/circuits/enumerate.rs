//! Bounded circuit enumeration.
//!
//! Canonical form: every gate feeds exactly one later node (single-use,
//! tree-shaped circuits), gates are listed in postorder, the output is the
//! last gate, and a commutative gate's left operand subtree never has more
//! gates than its right. Degenerate operations are not in the gate alphabet,
//! so the only gate-free circuits are the input projections and the two
//! constants. Every function computable within the gate bound under this
//! form appears as some yielded circuit's function; sharing-based circuits
//! are canonicalized away, which is what keeps the stream finite and the
//! coverage table computable.

use crate::config::Limits;
use crate::error::{Error, Result};

use super::{BooleanCircuit, Gate, GateOp};

const COMM_OPS: [GateOp; 6] = [
    GateOp::And,
    GateOp::Or,
    GateOp::Xor,
    GateOp::Nand,
    GateOp::Nor,
    GateOp::Xnor,
];

const NONCOMM_OPS: [GateOp; 4] = [
    GateOp::AndNot,
    GateOp::NotAnd,
    GateOp::OrNot,
    GateOp::NotOr,
];

/// Number of circuits `enumerate_circuits(k, s)` yields, computed from the
/// canonical-form recurrence without generating anything.
pub fn stream_len(k: usize, s: usize) -> u128 {
    let mut per_size: Vec<u128> = vec![k as u128 + 2];
    for c in 1..=s {
        let mut total = 0u128;
        for a in 0..=(c - 1) / 2 {
            total += 6 * per_size[a] * per_size[c - 1 - a];
        }
        for a in 0..c {
            total += 4 * per_size[a] * per_size[c - 1 - a];
        }
        per_size.push(total);
    }
    per_size.iter().sum()
}

/// Streams every canonical circuit with `k` inputs and at most `s` gates,
/// smallest sizes first. Refuses up front when the stream would exceed the
/// configured circuit budget.
pub fn enumerate_circuits(k: usize, s: usize, limits: &Limits) -> Result<CircuitStream> {
    if k == 0 {
        return Err(Error::input("enumeration arity must be at least 1"));
    }
    let total = stream_len(k, s);
    if total > limits.max_stream_circuits as u128 {
        return Err(Error::limit(format!(
            "enumeration of {total} circuits at k={k}, s={s} exceeds the stream cap {}",
            limits.max_stream_circuits
        )));
    }
    Ok(CircuitStream {
        k,
        max_size: s,
        cur_size: 0,
        holes: Vec::new(),
        trail: Vec::new(),
        started: false,
        exhausted: false,
    })
}

#[derive(Clone, Copy)]
struct Decision {
    hole_size: usize,
    choice: usize,
    is_op: bool,
}

/// Depth-first enumerator over prefix encodings of canonical trees.
pub struct CircuitStream {
    k: usize,
    max_size: usize,
    cur_size: usize,
    /// Gate budgets of the subtrees still to be generated; top is next.
    holes: Vec<usize>,
    trail: Vec<Decision>,
    started: bool,
    exhausted: bool,
}

impl CircuitStream {
    fn choice_count(&self, c: usize) -> usize {
        if c == 0 {
            self.k + 2
        } else {
            6 * ((c - 1) / 2 + 1) + 4 * c
        }
    }

    /// Decodes a choice index for a hole of size `c >= 1` into
    /// (operation, left subtree size).
    fn decode_op(&self, c: usize, choice: usize) -> (GateOp, usize) {
        let comm_splits = (c - 1) / 2 + 1;
        if choice < 6 * comm_splits {
            (COMM_OPS[choice / comm_splits], choice % comm_splits)
        } else {
            let r = choice - 6 * comm_splits;
            (NONCOMM_OPS[r / c], r % c)
        }
    }

    /// Applies `choice` to the top hole, pushing child holes for ops.
    fn apply(&mut self, choice: usize) {
        let c = self.holes.pop().expect("apply with no open hole");
        if c == 0 {
            self.trail.push(Decision { hole_size: c, choice, is_op: false });
        } else {
            let (_, a) = self.decode_op(c, choice);
            self.trail.push(Decision { hole_size: c, choice, is_op: true });
            self.holes.push(c - 1 - a);
            self.holes.push(a);
        }
    }

    /// Fills every open hole with its first choice.
    fn descend(&mut self) {
        while !self.holes.is_empty() {
            self.apply(0);
        }
    }

    /// Moves to the next complete tree of the current size, or reports false.
    fn advance(&mut self) -> bool {
        while let Some(d) = self.trail.pop() {
            if d.is_op {
                // Un-push this op's two child holes (currently unfilled).
                self.holes.pop();
                self.holes.pop();
            }
            self.holes.push(d.hole_size);
            if d.choice + 1 < self.choice_count(d.hole_size) {
                self.apply(d.choice + 1);
                self.descend();
                return true;
            }
            // Leave the hole open and backtrack further.
        }
        false
    }

    fn materialize(&self) -> BooleanCircuit {
        fn build(
            k: usize,
            stream: &CircuitStream,
            pos: &mut usize,
            gates: &mut Vec<Gate>,
        ) -> usize {
            let d = stream.trail[*pos];
            *pos += 1;
            if !d.is_op {
                return d.choice;
            }
            let (op, _) = stream.decode_op(d.hole_size, d.choice);
            let left = build(k, stream, pos, gates);
            let right = build(k, stream, pos, gates);
            gates.push(Gate { op, left, right });
            k + 2 + gates.len() - 1
        }
        let mut gates = Vec::new();
        let mut pos = 0;
        let output = build(self.k, self, &mut pos, &mut gates);
        BooleanCircuit::new(self.k, gates, output)
            .expect("canonical tree is always a valid circuit")
    }
}

impl Iterator for CircuitStream {
    type Item = BooleanCircuit;

    fn next(&mut self) -> Option<BooleanCircuit> {
        if self.exhausted {
            return None;
        }
        if !self.started {
            self.started = true;
            self.holes.push(self.cur_size);
            self.descend();
            return Some(self.materialize());
        }
        if self.advance() {
            return Some(self.materialize());
        }
        // Current size exhausted; start the next one.
        while self.cur_size < self.max_size {
            self.cur_size += 1;
            self.holes.clear();
            self.trail.clear();
            self.holes.push(self.cur_size);
            self.descend();
            return Some(self.materialize());
        }
        self.exhausted = true;
        None
    }
}
