//! Gate-bounded function coverage.
//!
//! For arities up to the coverage cap this module computes, once per
//! process, the minimal canonical gate count of every function (the same
//! canonical form the enumerator streams). `gate_bounded_functions(k, s)`
//! is therefore exactly the set of functions some enumerated circuit with
//! at most `s` gates computes, obtained without streaming circuits.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::config::Limits;
use crate::error::{Error, Result};

use super::{leaf_masks, tt_width_mask, TruthTable};

struct LevelTable {
    /// Minimal canonical gate count per function mask; index = packed table.
    first_seen: Vec<u8>,
    /// Level at which the last function appeared.
    max_level: u8,
}

fn tables() -> &'static Mutex<HashMap<usize, Arc<LevelTable>>> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<LevelTable>>>> = OnceLock::new();
    TABLES.get_or_init(|| Mutex::new(HashMap::new()))
}

fn level_table(k: usize) -> Arc<LevelTable> {
    let mut guard = tables().lock().expect("coverage table lock poisoned");
    if let Some(t) = guard.get(&k) {
        return Arc::clone(t);
    }
    let t = Arc::new(compute_level_table(k));
    guard.insert(k, Arc::clone(&t));
    t
}

/// Five base operations; the other five are their complements.
pub(super) fn base_ops(f: u64, g: u64) -> [u64; 5] {
    [f & g, f | g, f ^ g, f & !g, !f & g]
}

fn compute_level_table(k: usize) -> LevelTable {
    let all = tt_width_mask(k);
    let width = 1usize << (1usize << k);
    let mut first_seen = vec![u8::MAX; width];
    let mut levels: Vec<Vec<u64>> = Vec::new();

    let mut seen = 0usize;
    let mark = |first_seen: &mut Vec<u8>, seen: &mut usize, level: &mut Vec<u64>, c: u8, h: u64| {
        if first_seen[h as usize] == u8::MAX {
            first_seen[h as usize] = c;
            *seen += 1;
            level.push(h);
        }
    };

    let mut l0 = Vec::new();
    for m in leaf_masks(k) {
        mark(&mut first_seen, &mut seen, &mut l0, 0, m);
    }
    mark(&mut first_seen, &mut seen, &mut l0, 0, 0);
    mark(&mut first_seen, &mut seen, &mut l0, 0, all);
    levels.push(l0);

    let mut c = 0u8;
    while seen < width {
        c += 1;
        let mut new = Vec::new();
        for a in 0..c as usize {
            let b = c as usize - 1 - a;
            if a > b {
                break;
            }
            // Budget splits with a <= b suffice: base_ops applies both
            // orientations of the asymmetric operations to each pair, and
            // each complement supplies the remaining five operations.
            let (la, lb) = (&levels[a], &levels[b]);
            for (i, &f) in la.iter().enumerate() {
                let start = if a == b { i } else { 0 };
                for &g in &lb[start..] {
                    for h in base_ops(f, g) {
                        let h = h & all;
                        mark(&mut first_seen, &mut seen, &mut new, c, h);
                        mark(&mut first_seen, &mut seen, &mut new, c, !h & all);
                    }
                }
            }
        }
        if new.is_empty() {
            break;
        }
        levels.push(new);
    }
    LevelTable { first_seen, max_level: c }
}

fn check_arity(k: usize, limits: &Limits) -> Result<()> {
    if k == 0 {
        return Err(Error::input("coverage arity must be at least 1"));
    }
    if k > limits.max_coverage_arity {
        return Err(Error::limit(format!(
            "gate-bounded function table at arity {k} exceeds cap {}",
            limits.max_coverage_arity
        )));
    }
    Ok(())
}

/// Every `k`-ary function computable by an enumerated circuit with at most
/// `s` gates, in ascending packed-table order.
pub fn gate_bounded_functions(k: usize, s: usize, limits: &Limits) -> Result<Vec<TruthTable>> {
    check_arity(k, limits)?;
    let table = level_table(k);
    let bound = s.min(u8::MAX as usize) as u8;
    let mut out = Vec::new();
    for (mask, &lvl) in table.first_seen.iter().enumerate() {
        if lvl <= bound {
            out.push(TruthTable::from_mask(k, mask as u64));
        }
    }
    Ok(out)
}

/// Smallest gate bound at which every `k`-ary function is covered.
pub fn coverage_gate_bound(k: usize, limits: &Limits) -> Result<usize> {
    check_arity(k, limits)?;
    let table = level_table(k);
    if table.first_seen.iter().any(|&l| l == u8::MAX) {
        return Err(Error::ConstructionFailed(format!(
            "coverage at arity {k} stalled before reaching every function"
        )));
    }
    Ok(table.max_level as usize)
}
