//! Exact circuit complexity by iterative-deepening exhaustive search.
//!
//! `circuit_complexity` returns the minimum number of gates in any circuit
//! (shared subcircuits allowed) computing a given truth table over the
//! ten-operation binary basis with free constant leaves.  The search walks
//! boolean chains: a chain of `s` gates is a sequence of masks, each produced
//! by applying an operation to two distinct earlier nodes, whose final gate
//! equals the target.  Iterative deepening guarantees the first size at which
//! a chain exists is the minimum.
//!
//! The search stays exact; the prunings below only discard chains that are
//! provably not minimal chains for the target:
//!
//! * every gate must compute a mask distinct from all earlier nodes
//!   (a duplicate gate could be dropped);
//! * no gate before the last may equal the target (a shorter chain would
//!   exist, contradicting the deepening order);
//! * adjacent independent gates are forced into ascending order (swapping
//!   them yields the same circuit);
//! * at every prefix, the number of gates not yet feeding anything may not
//!   exceed the remaining budget plus one (each later gate can retire at
//!   most two of them while adding itself, and only the output may remain);
//! * the final gate must consume every still-dangling gate.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::coverage::base_ops;
use super::{leaf_masks, TruthTable};
use crate::config::Limits;
use crate::error::{Error, Result};

/// Gates needed for the hardest function of the given arity, used as the
/// deepening cap.  Generous: four inputs never need more than this many
/// gates over the full binary basis.
fn depth_cap(arity: usize) -> usize {
    1 << (arity + 1)
}

fn memo() -> &'static Mutex<HashMap<(usize, u64), usize>> {
    static MEMO: OnceLock<Mutex<HashMap<(usize, u64), usize>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_arity(arity: usize, limits: &Limits) -> Result<()> {
    if arity == 0 {
        return Err(Error::input("truth table arity must be at least 1"));
    }
    if arity > limits.max_complexity_arity {
        return Err(Error::limit(format!(
            "exact complexity search supports arity up to {}, got {}",
            limits.max_complexity_arity, arity
        )));
    }
    Ok(())
}

struct Search {
    target: u64,
    all: u64,
    masks: Vec<u64>,
    /// Per node, how many gates consume it.
    fanout: Vec<u32>,
    /// Gate descriptors (left, right, op index) for the ordering prune.
    gates: Vec<(usize, usize, usize)>,
    base_len: usize,
}

/// The ten operations as (index, mask) pairs for a node pair, in a fixed
/// order so that gate descriptors compare consistently.
fn op_masks(f: u64, g: u64, all: u64) -> [u64; 10] {
    let base = base_ops(f, g);
    let mut out = [0u64; 10];
    for (i, &h) in base.iter().enumerate() {
        out[2 * i] = h & all;
        out[2 * i + 1] = !h & all;
    }
    out
}

impl Search {
    fn dangling_gates(&self) -> usize {
        (self.base_len..self.masks.len())
            .filter(|&i| self.fanout[i] == 0)
            .count()
    }

    /// Try to finish the chain with one more gate computing the target.
    fn close(&mut self) -> bool {
        let dangling: Vec<usize> = (self.base_len..self.masks.len())
            .filter(|&i| self.fanout[i] == 0)
            .collect();
        let n = self.masks.len();
        match dangling.len() {
            0 => {
                for i in 0..n {
                    for j in i + 1..n {
                        if self.pair_hits_target(i, j) {
                            return true;
                        }
                    }
                }
                false
            }
            1 => {
                let d = dangling[0];
                (0..n).any(|other| other != d && self.pair_hits_target(d.min(other), d.max(other)))
            }
            2 => self.pair_hits_target(dangling[0], dangling[1]),
            _ => false,
        }
    }

    fn pair_hits_target(&self, i: usize, j: usize) -> bool {
        op_masks(self.masks[i], self.masks[j], self.all)
            .iter()
            .any(|&h| h == self.target)
    }

    fn dfs(&mut self, remaining: usize) -> bool {
        if remaining == 1 {
            return self.close();
        }
        let n = self.masks.len();
        let dangling = self.dangling_gates();
        for i in 0..n {
            for j in i + 1..n {
                let masks = op_masks(self.masks[i], self.masks[j], self.all);
                for (op, &h) in masks.iter().enumerate() {
                    if h == self.target || self.masks.contains(&h) {
                        continue;
                    }
                    if let Some(&(pi, pj, pop)) = self.gates.last() {
                        let prev_idx = n - 1;
                        if i != prev_idx && j != prev_idx && (i, j, op) <= (pi, pj, pop) {
                            continue;
                        }
                    }
                    let retired = usize::from(i >= self.base_len && self.fanout[i] == 0)
                        + usize::from(j >= self.base_len && self.fanout[j] == 0);
                    if dangling - retired + 1 > remaining {
                        continue;
                    }
                    self.masks.push(h);
                    self.fanout.push(0);
                    self.fanout[i] += 1;
                    self.fanout[j] += 1;
                    self.gates.push((i, j, op));
                    if self.dfs(remaining - 1) {
                        return true;
                    }
                    self.gates.pop();
                    self.fanout[j] -= 1;
                    self.fanout[i] -= 1;
                    self.fanout.pop();
                    self.masks.pop();
                }
            }
        }
        false
    }
}

fn base_masks(arity: usize) -> (Vec<u64>, u64) {
    let mut masks = leaf_masks(arity);
    let all = super::tt_width_mask(arity);
    masks.push(0);
    masks.push(all);
    (masks, all)
}

/// Search for a chain of exactly `size` gates computing `target`.
fn chain_exists(arity: usize, target: u64, size: usize) -> bool {
    let (masks, all) = base_masks(arity);
    let base_len = masks.len();
    let mut search = Search {
        target,
        all,
        fanout: vec![0; masks.len()],
        masks,
        gates: Vec::new(),
        base_len,
    };
    search.dfs(size)
}

fn complexity_up_to(tt: &TruthTable, bound: usize, limits: &Limits) -> Result<Option<usize>> {
    let arity = tt.arity();
    check_arity(arity, limits)?;
    let target = tt.to_mask();
    if let Some(&known) = memo().lock().unwrap().get(&(arity, target)) {
        return Ok(if known <= bound { Some(known) } else { None });
    }
    let (masks, all) = base_masks(arity);
    if masks.contains(&target) {
        memo().lock().unwrap().insert((arity, target), 0);
        return Ok(Some(0));
    }
    for size in 1..=bound {
        if chain_exists(arity, target, size) {
            let mut table = memo().lock().unwrap();
            table.insert((arity, target), size);
            // Complementing the output gate's operation complements the
            // function at identical size, and the complement is not a free
            // leaf (those were handled above).
            let flipped = !target & all;
            if !masks.contains(&flipped) {
                table.insert((arity, flipped), size);
            }
            return Ok(Some(size));
        }
    }
    Ok(None)
}

/// Exact minimum gate count for `tt` over the ten-operation basis, with
/// constants and inputs as free leaves and sharing allowed.
pub fn circuit_complexity(tt: &TruthTable, limits: &Limits) -> Result<usize> {
    match complexity_up_to(tt, depth_cap(tt.arity()), limits)? {
        Some(size) => Ok(size),
        None => Err(Error::limit(format!(
            "no circuit with at most {} gates found for a {}-ary table; \
             the deepening cap should exceed every reachable complexity",
            depth_cap(tt.arity()),
            tt.arity()
        ))),
    }
}

/// Whether some circuit of at most `bound` gates computes `tt`.
pub fn complexity_within(tt: &TruthTable, bound: usize, limits: &Limits) -> Result<bool> {
    Ok(complexity_up_to(tt, bound, limits)?.is_some())
}
