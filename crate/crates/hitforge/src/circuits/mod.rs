//! Fan-in-2 Boolean circuits over the full binary basis, their truth tables,
//! bounded enumeration, and an exact minimum-size oracle.
//!
//! Size is measured in gates. Input variables and the two constant leaves are
//! free: a circuit with no gates can output a variable or a constant, and
//! nothing else. Node indices address, in order, the `k` inputs, constant 0,
//! constant 1, and then the gates.

mod complexity;
mod coverage;
mod enumerate;
mod format;

pub use complexity::{circuit_complexity, complexity_within};
pub use coverage::{coverage_gate_bound, gate_bounded_functions};
pub use enumerate::{enumerate_circuits, stream_len, CircuitStream};

use crate::bits::BitString;
use crate::config::Limits;
use crate::error::{Error, Result};

/// The ten binary operations that depend on both arguments. Constants and
/// projections are excluded: they are representable without a gate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GateOp {
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
    /// a AND NOT b
    AndNot,
    /// NOT a AND b
    NotAnd,
    /// a OR NOT b
    OrNot,
    /// NOT a OR b
    NotOr,
}

pub const ALL_OPS: [GateOp; 10] = [
    GateOp::And,
    GateOp::Or,
    GateOp::Xor,
    GateOp::Nand,
    GateOp::Nor,
    GateOp::Xnor,
    GateOp::AndNot,
    GateOp::NotAnd,
    GateOp::OrNot,
    GateOp::NotOr,
];

impl GateOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateOp::And => a & b,
            GateOp::Or => a | b,
            GateOp::Xor => a ^ b,
            GateOp::Nand => !(a & b),
            GateOp::Nor => !(a | b),
            GateOp::Xnor => !(a ^ b),
            GateOp::AndNot => a & !b,
            GateOp::NotAnd => !a & b,
            GateOp::OrNot => a | !b,
            GateOp::NotOr => !a | b,
        }
    }

    /// Bit-parallel form of `apply` over packed truth-table words.
    pub(crate) fn apply_mask(self, a: u64, b: u64, all: u64) -> u64 {
        let v = match self {
            GateOp::And => a & b,
            GateOp::Or => a | b,
            GateOp::Xor => a ^ b,
            GateOp::Nand => !(a & b),
            GateOp::Nor => !(a | b),
            GateOp::Xnor => !(a ^ b),
            GateOp::AndNot => a & !b,
            GateOp::NotAnd => !a & b,
            GateOp::OrNot => a | !b,
            GateOp::NotOr => !a | b,
        };
        v & all
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Xor => "XOR",
            GateOp::Nand => "NAND",
            GateOp::Nor => "NOR",
            GateOp::Xnor => "XNOR",
            GateOp::AndNot => "ANDNOT",
            GateOp::NotAnd => "NOTAND",
            GateOp::OrNot => "ORNOT",
            GateOp::NotOr => "NOTOR",
        }
    }

    pub fn from_name(name: &str) -> Result<GateOp> {
        ALL_OPS
            .iter()
            .copied()
            .find(|op| op.name() == name)
            .ok_or_else(|| Error::parse(format!("unknown gate operation {name:?}")))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Gate {
    pub op: GateOp,
    pub left: usize,
    pub right: usize,
}

/// A circuit with `arity` inputs. Construction validates that every gate
/// reads only earlier nodes, that the output index is in range, and that
/// every gate is reachable from the output.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BooleanCircuit {
    arity: usize,
    gates: Vec<Gate>,
    output: usize,
}

impl BooleanCircuit {
    pub fn new(arity: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::input("circuit arity must be at least 1"));
        }
        let leaves = arity + 2;
        for (i, g) in gates.iter().enumerate() {
            let bound = leaves + i;
            if g.left >= bound || g.right >= bound {
                return Err(Error::input(format!(
                    "gate {i} reads node {} but only {} earlier nodes exist",
                    g.left.max(g.right),
                    bound
                )));
            }
        }
        if output >= leaves + gates.len() {
            return Err(Error::input(format!(
                "output index {output} out of range for {} nodes",
                leaves + gates.len()
            )));
        }
        // Every gate must feed the output.
        let mut reachable = vec![false; gates.len()];
        let mut stack = Vec::new();
        if output >= leaves {
            stack.push(output - leaves);
        }
        while let Some(i) = stack.pop() {
            if reachable[i] {
                continue;
            }
            reachable[i] = true;
            for node in [gates[i].left, gates[i].right] {
                if node >= leaves {
                    stack.push(node - leaves);
                }
            }
        }
        if let Some(dead) = reachable.iter().position(|&r| !r) {
            return Err(Error::input(format!(
                "gate {dead} is not reachable from the output"
            )));
        }
        Ok(BooleanCircuit { arity, gates, output })
    }

    /// Gate-free circuit returning input `index`.
    pub fn projection(arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::input(format!(
                "projection index {index} out of range for arity {arity}"
            )));
        }
        BooleanCircuit::new(arity, Vec::new(), index)
    }

    /// Gate-free circuit returning the constant `value`.
    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        BooleanCircuit::new(arity, Vec::new(), arity + value as usize)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Number of gates. (Wire count in the two-input basis is twice this.)
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn eval(&self, input: &BitString) -> Result<bool> {
        if input.len() != self.arity {
            return Err(Error::input(format!(
                "input of length {} fed to a circuit of arity {}",
                input.len(),
                self.arity
            )));
        }
        let leaves = self.arity + 2;
        let mut values = Vec::with_capacity(leaves + self.gates.len());
        for i in 0..self.arity {
            values.push(input.get(i));
        }
        values.push(false);
        values.push(true);
        for g in &self.gates {
            let v = g.op.apply(values[g.left], values[g.right]);
            values.push(v);
        }
        Ok(values[self.output])
    }

    /// Full truth table, positions indexed by input value. Guarded by the
    /// truth-table arity cap.
    pub fn truth_table(&self, limits: &Limits) -> Result<TruthTable> {
        if self.arity > limits.max_truth_table_arity {
            return Err(Error::limit(format!(
                "truth table at arity {} exceeds cap {}",
                self.arity, limits.max_truth_table_arity
            )));
        }
        if self.arity <= 6 {
            let all = tt_width_mask(self.arity);
            let mask = self.eval_mask(&leaf_masks(self.arity), all);
            return Ok(TruthTable::from_mask(self.arity, mask));
        }
        let mut bits = BitString::zeros(0);
        for j in 0..1u64 << self.arity {
            let input = BitString::from_value(j, self.arity);
            bits.push(self.eval(&input)?);
        }
        TruthTable::new(self.arity, bits)
    }

    /// Evaluates every node bit-parallel over packed truth-table words.
    /// Only valid for arity <= 6.
    pub(crate) fn eval_mask(&self, leaves: &[u64], all: u64) -> u64 {
        let mut values = Vec::with_capacity(leaves.len() + 2 + self.gates.len());
        values.extend_from_slice(leaves);
        values.push(0);
        values.push(all);
        for g in &self.gates {
            let v = g.op.apply_mask(values[g.left], values[g.right], all);
            values.push(v);
        }
        values[self.output]
    }

    /// How many of the `2^arity` inputs the circuit accepts, evaluating 64
    /// inputs per word. Callers enforce the arity cap.
    pub(crate) fn accepted_inputs(&self) -> u64 {
        if self.arity <= 6 {
            let all = tt_width_mask(self.arity);
            return (self.eval_mask(&leaf_masks(self.arity), all) & all).count_ones() as u64;
        }
        // Within a 64-aligned block, input bits below position 6 follow a
        // fixed periodic pattern; bits at position 6 and above are constant
        // across the block.
        let mut low_patterns = [0u64; 6];
        for (shift, pattern) in low_patterns.iter_mut().enumerate() {
            for j in 0..64u64 {
                if j >> shift & 1 == 1 {
                    *pattern |= 1 << j;
                }
            }
        }
        let blocks = 1u64 << (self.arity - 6);
        let mut leaves = vec![0u64; self.arity];
        let mut count = 0u64;
        for block in 0..blocks {
            let base = block << 6;
            for i in 0..self.arity {
                let shift = self.arity - 1 - i;
                leaves[i] = if shift < 6 {
                    low_patterns[shift]
                } else if base >> shift & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
            }
            count += self.eval_mask(&leaves, u64::MAX).count_ones() as u64;
        }
        count
    }
}

/// Packed truth-table word for each input variable of a circuit of `arity`
/// inputs: bit `j` of word `i` is the value of variable `i` on input `j`.
/// Variable 0 is the most significant position of the input index.
pub(crate) fn leaf_masks(arity: usize) -> Vec<u64> {
    debug_assert!(arity <= 6);
    let width = 1u64 << arity;
    (0..arity)
        .map(|i| {
            let mut m = 0u64;
            for j in 0..width {
                if j >> (arity - 1 - i) & 1 == 1 {
                    m |= 1 << j;
                }
            }
            m
        })
        .collect()
}

pub(crate) fn tt_width_mask(arity: usize) -> u64 {
    debug_assert!(arity <= 6);
    if arity == 6 {
        u64::MAX
    } else {
        (1u64 << (1 << arity)) - 1
    }
}

/// Truth table of a `arity`-input function: `2^arity` bits, position `j`
/// holding the value on the input whose most-significant-bit-first encoding
/// is `j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruthTable {
    arity: usize,
    bits: BitString,
}

impl TruthTable {
    pub fn new(arity: usize, bits: BitString) -> Result<Self> {
        if arity == 0 {
            return Err(Error::input("truth table arity must be at least 1"));
        }
        if bits.len() != 1usize << arity {
            return Err(Error::input(format!(
                "truth table of arity {arity} needs {} bits, got {}",
                1usize << arity,
                bits.len()
            )));
        }
        Ok(TruthTable { arity, bits })
    }

    /// Parses a bit string whose length must be a power of two.
    pub fn from_bits(bits: BitString) -> Result<Self> {
        let len = bits.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::input(format!(
                "truth table length must be a power of two >= 2, got {len}"
            )));
        }
        Ok(TruthTable { arity: len.trailing_zeros() as usize, bits })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn eval(&self, input: &BitString) -> Result<bool> {
        if input.len() != self.arity {
            return Err(Error::input(format!(
                "input of length {} fed to a truth table of arity {}",
                input.len(),
                self.arity
            )));
        }
        Ok(self.bits.get(input.to_value()? as usize))
    }

    pub(crate) fn to_mask(&self) -> u64 {
        debug_assert!(self.arity <= 6);
        let mut m = 0u64;
        for (j, b) in self.bits.iter().enumerate() {
            if b {
                m |= 1 << j;
            }
        }
        m
    }

    pub(crate) fn from_mask(arity: usize, mask: u64) -> TruthTable {
        debug_assert!(arity <= 6);
        let mut bits = BitString::zeros(0);
        for j in 0..1u64 << arity {
            bits.push(mask >> j & 1 == 1);
        }
        TruthTable { arity, bits }
    }
}

impl std::fmt::Display for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.bits)
    }
}
