//! Canonical-element construction.
//!
//! The pipeline pieces: a `RandomizedProducer` abstracts any randomized
//! procedure that emits a fixed-length string or ⊥; `amplify` repeats one
//! and takes the plurality; `purify` repeats one n² times and keeps a
//! value only when it wins more than 3/5 of the trials, making at most one
//! non-⊥ answer likely across reruns; `first_member` scans a hitting set
//! in lexicographic order for a property member; and the composite
//! constructors chain a produced truth table through the seed-enumeration
//! generator to a canonical property member.

use std::collections::BTreeMap;

use rand::Rng;

use crate::bits::BitString;
use crate::circuits::{complexity_within, BooleanCircuit, TruthTable};
use crate::config::Limits;
use crate::easy_witness::build_easy_hitting_set;
use crate::error::{Error, Result};
use crate::hitting::HittingSet;
use crate::nwgen::{build_design, nw_hitting_set, NWGenerator};
use crate::properties::Property;
use crate::Rat;

/// A randomized procedure producing, for a target length n, either a bit
/// string of length `expected_output_length(n)` or ⊥ (None). Producers may
/// carry state (deterministic alternation does), so `produce` takes `&mut
/// self`; all randomness comes from the explicit source.
pub trait RandomizedProducer {
    fn expected_output_length(&self, n: usize) -> usize;
    fn produce(&mut self, n: usize, rng: &mut dyn Rng) -> Result<Option<BitString>>;
}

/// Uniform random bit string of length n, consuming one 64-bit word per
/// 64 bits of output.
pub fn uniform_bits(rng: &mut dyn Rng, n: usize) -> BitString {
    let mut out = BitString::default();
    let mut word = 0u64;
    for j in 0..n {
        if j % 64 == 0 {
            word = rng.next_u64();
        }
        out.push(word >> (j % 64) & 1 == 1);
    }
    out
}

fn bernoulli(rng: &mut dyn Rng, num: u64, den: u64) -> bool {
    rng.next_u64() % den < num
}

/// Always returns the same string.
pub struct FixedProducer {
    pub value: BitString,
}

impl RandomizedProducer for FixedProducer {
    fn expected_output_length(&self, _n: usize) -> usize {
        self.value.len()
    }
    fn produce(&mut self, _n: usize, _rng: &mut dyn Rng) -> Result<Option<BitString>> {
        Ok(Some(self.value.clone()))
    }
}

/// Deterministically alternates between two strings, first one first.
pub struct AlternatingProducer {
    pub first: BitString,
    pub second: BitString,
    emit_second: bool,
}

impl AlternatingProducer {
    pub fn new(first: BitString, second: BitString) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::input("alternating producer needs equal-length strings"));
        }
        Ok(AlternatingProducer { first, second, emit_second: false })
    }
}

impl RandomizedProducer for AlternatingProducer {
    fn expected_output_length(&self, _n: usize) -> usize {
        self.first.len()
    }
    fn produce(&mut self, _n: usize, _rng: &mut dyn Rng) -> Result<Option<BitString>> {
        let out = if self.emit_second { &self.second } else { &self.first };
        self.emit_second = !self.emit_second;
        Ok(Some(out.clone()))
    }
}

/// Returns the value with probability num/den, otherwise ⊥.
pub struct FixedOrBot {
    pub value: BitString,
    pub num: u64,
    pub den: u64,
}

impl RandomizedProducer for FixedOrBot {
    fn expected_output_length(&self, _n: usize) -> usize {
        self.value.len()
    }
    fn produce(&mut self, _n: usize, rng: &mut dyn Rng) -> Result<Option<BitString>> {
        Ok(bernoulli(rng, self.num, self.den).then(|| self.value.clone()))
    }
}

/// Returns the value with probability num/den, otherwise a uniformly
/// random string of the same length.
pub struct FixedOrUniform {
    pub value: BitString,
    pub num: u64,
    pub den: u64,
}

impl RandomizedProducer for FixedOrUniform {
    fn expected_output_length(&self, _n: usize) -> usize {
        self.value.len()
    }
    fn produce(&mut self, _n: usize, rng: &mut dyn Rng) -> Result<Option<BitString>> {
        if bernoulli(rng, self.num, self.den) {
            Ok(Some(self.value.clone()))
        } else {
            Ok(Some(uniform_bits(rng, self.value.len())))
        }
    }
}

/// Returns one of two strings, each with probability 1/2.
pub struct TwoValueProducer {
    pub a: BitString,
    pub b: BitString,
}

impl TwoValueProducer {
    pub fn new(a: BitString, b: BitString) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::input("two-value producer needs equal-length strings"));
        }
        Ok(TwoValueProducer { a, b })
    }
}

impl RandomizedProducer for TwoValueProducer {
    fn expected_output_length(&self, _n: usize) -> usize {
        self.a.len()
    }
    fn produce(&mut self, _n: usize, rng: &mut dyn Rng) -> Result<Option<BitString>> {
        Ok(Some(if rng.next_u64() & 1 == 0 { self.a.clone() } else { self.b.clone() }))
    }
}

/// Parse a producer description:
/// `fixed:<bits>`, `alternate:<bits>/<bits>`, `two:<bits>/<bits>`,
/// `biased:<bits>@<num>/<den>` (value or ⊥),
/// `noisy:<bits>@<num>/<den>` (value or uniform noise).
pub fn parse_producer(spec: &str) -> Result<Box<dyn RandomizedProducer>> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::parse(format!("producer spec {spec:?} is missing a kind prefix")))?;
    let pair = |s: &str| -> Result<(BitString, BitString)> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::parse(format!("expected <bits>/<bits> in {s:?}")))?;
        Ok((a.parse()?, b.parse()?))
    };
    let weighted = |s: &str| -> Result<(BitString, u64, u64)> {
        let (bits, frac) = s
            .split_once('@')
            .ok_or_else(|| Error::parse(format!("expected <bits>@<num>/<den> in {s:?}")))?;
        let (num, den) = frac
            .split_once('/')
            .ok_or_else(|| Error::parse(format!("expected <num>/<den> in {frac:?}")))?;
        let num: u64 = num.parse().map_err(|_| Error::parse(format!("bad numerator {num:?}")))?;
        let den: u64 = den.parse().map_err(|_| Error::parse(format!("bad denominator {den:?}")))?;
        if den == 0 || num > den {
            return Err(Error::parse(format!("probability {num}/{den} is not in [0,1]")));
        }
        Ok((bits.parse()?, num, den))
    };
    match kind {
        "fixed" => Ok(Box::new(FixedProducer { value: rest.parse()? })),
        "alternate" => {
            let (a, b) = pair(rest)?;
            Ok(Box::new(AlternatingProducer::new(a, b)?))
        }
        "two" => {
            let (a, b) = pair(rest)?;
            Ok(Box::new(TwoValueProducer::new(a, b)?))
        }
        "biased" => {
            let (value, num, den) = weighted(rest)?;
            Ok(Box::new(FixedOrBot { value, num, den }))
        }
        "noisy" => {
            let (value, num, den) = weighted(rest)?;
            Ok(Box::new(FixedOrUniform { value, num, den }))
        }
        other => Err(Error::parse(format!("unknown producer kind {other:?}"))),
    }
}

fn checked_produce(
    producer: &mut dyn RandomizedProducer,
    n: usize,
    rng: &mut dyn Rng,
) -> Result<Option<BitString>> {
    let expected = producer.expected_output_length(n);
    match producer.produce(n, rng)? {
        None => Ok(None),
        Some(out) => {
            if out.len() != expected {
                return Err(Error::ProducerContract(format!(
                    "producer declared length {expected} but emitted {}",
                    out.len()
                )));
            }
            Ok(Some(out))
        }
    }
}

/// Run the producer `reps` times and return the most frequent non-⊥
/// output, ties broken toward the lexicographically smaller string; ⊥ if
/// every run returned ⊥.
pub fn amplify(
    producer: &mut dyn RandomizedProducer,
    n: usize,
    reps: usize,
    rng: &mut dyn Rng,
) -> Result<Option<BitString>> {
    if reps == 0 {
        return Err(Error::input("amplification needs at least one repetition"));
    }
    let mut tally: BTreeMap<BitString, usize> = BTreeMap::new();
    for _ in 0..reps {
        if let Some(out) = checked_produce(producer, n, rng)? {
            *tally.entry(out).or_insert(0) += 1;
        }
    }
    let mut winner: Option<(&BitString, usize)> = None;
    for (value, &count) in &tally {
        if winner.map_or(true, |(_, best)| count > best) {
            winner = Some((value, count));
        }
    }
    Ok(winner.map(|(value, _)| value.clone()))
}

/// Purifier tuning. `trials` of None means n²; a value wins when
/// `count · threshold_den > trials · threshold_num` (default 3/5).
#[derive(Clone, Copy, Debug)]
pub struct PurifierConfig {
    pub trials: Option<usize>,
    pub threshold_num: usize,
    pub threshold_den: usize,
}

impl Default for PurifierConfig {
    fn default() -> Self {
        PurifierConfig { trials: None, threshold_num: 3, threshold_den: 5 }
    }
}

/// The result of one purifier run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PurifiedOutput {
    pub value: Option<BitString>,
    pub trial_count: usize,
    pub winner_count: usize,
}

/// Run the producer n² times and keep the lexicographically first value
/// appearing in strictly more than 3/5 of the trials, else ⊥. With the
/// default threshold above 1/2 at most one value can qualify, so across
/// reruns the non-⊥ outputs concentrate on a single candidate.
pub fn purify(
    producer: &mut dyn RandomizedProducer,
    n: usize,
    rng: &mut dyn Rng,
) -> Result<PurifiedOutput> {
    purify_with(producer, n, rng, &PurifierConfig::default())
}

pub fn purify_with(
    producer: &mut dyn RandomizedProducer,
    n: usize,
    rng: &mut dyn Rng,
    config: &PurifierConfig,
) -> Result<PurifiedOutput> {
    if n == 0 {
        return Err(Error::input("purification needs a positive length"));
    }
    if config.threshold_den == 0 {
        return Err(Error::input("purifier threshold denominator must be positive"));
    }
    let trials = config.trials.unwrap_or(n * n);
    if trials == 0 {
        return Err(Error::input("purifier trial count must be positive"));
    }
    let mut tally: BTreeMap<BitString, usize> = BTreeMap::new();
    for _ in 0..trials {
        if let Some(out) = checked_produce(producer, n, rng)? {
            *tally.entry(out).or_insert(0) += 1;
        }
    }
    for (value, &count) in &tally {
        if count * config.threshold_den > trials * config.threshold_num {
            return Ok(PurifiedOutput {
                value: Some(value.clone()),
                trial_count: trials,
                winner_count: count,
            });
        }
    }
    Ok(PurifiedOutput { value: None, trial_count: trials, winner_count: 0 })
}

/// Adapter that presents the purifier as a producer, for chaining into the
/// composite constructors.
pub struct PurifyingProducer<P: RandomizedProducer> {
    inner: P,
    config: PurifierConfig,
}

impl<P: RandomizedProducer> PurifyingProducer<P> {
    pub fn new(inner: P) -> Self {
        PurifyingProducer { inner, config: PurifierConfig::default() }
    }
    pub fn with_config(inner: P, config: PurifierConfig) -> Self {
        PurifyingProducer { inner, config }
    }
}

impl<P: RandomizedProducer> RandomizedProducer for PurifyingProducer<P> {
    fn expected_output_length(&self, n: usize) -> usize {
        self.inner.expected_output_length(n)
    }
    fn produce(&mut self, n: usize, rng: &mut dyn Rng) -> Result<Option<BitString>> {
        Ok(purify_with(&mut self.inner, n, rng, &self.config)?.value)
    }
}

/// The lexicographically smallest element of H that lies in Q, or None.
/// Order-independent: the set is re-sorted before scanning.
pub fn first_member(h: &HittingSet, q: &dyn Property) -> Result<Option<BitString>> {
    let sorted = h.sorted_distinct();
    const CHUNK: usize = 1024;
    for chunk in sorted.chunks(CHUNK) {
        let answers = q.contains_batch(chunk)?;
        if let Some(i) = answers.iter().position(|&b| b) {
            return Ok(Some(chunk[i].clone()));
        }
    }
    Ok(None)
}

/// Generator shape for the composite constructors: r output bits per seed,
/// pairwise set overlap at most t.
#[derive(Clone, Copy, Debug)]
pub struct NwParams {
    pub output_length: usize,
    pub max_intersection: usize,
}

/// One round of the canonical constructor: obtain a truth table from the
/// producer, stretch it into a hitting set by enumerating every seed, and
/// return the lexicographically first member of Q among the truncated
/// outputs. Whenever the producer emits its canonical table, the result is
/// the same string; a ⊥ from the producer propagates as ⊥.
pub fn pseudodeterministic_construct(
    tt_producer: &mut dyn RandomizedProducer,
    q: &dyn Property,
    n: usize,
    nw: &NwParams,
    rng: &mut dyn Rng,
    limits: &Limits,
) -> Result<Option<BitString>> {
    let table = match checked_produce(tt_producer, n, rng)? {
        None => return Ok(None),
        Some(bits) => TruthTable::from_bits(bits)
            .map_err(|e| Error::ProducerContract(format!("produced bits are not a truth table: {e}")))?,
    };
    if nw.output_length < n {
        return Err(Error::input(format!(
            "generator output length {} is below the target length {n}",
            nw.output_length
        )));
    }
    let design = build_design(nw.output_length, table.arity(), nw.max_intersection, limits)?;
    let gen = NWGenerator::new(table, design)?;
    let h = nw_hitting_set(&gen, n, limits)?;
    first_member(&h, q)
}

/// Parameters for the sampled-hardness derandomizer.
#[derive(Clone, Copy, Debug)]
pub struct DerandomizeParams {
    /// Length of each uniformly drawn candidate string.
    pub sample_len: usize,
    /// Give up after this many draws.
    pub max_draws: usize,
    /// When set, a sampled table is accepted only if no circuit of at most
    /// this many gates computes it.
    pub hardness_threshold: Option<usize>,
    pub nw: NwParams,
}

/// What the derandomizer did: the estimate (or ⊥), how many draws it
/// spent, and how many samples the hardness certificate rejected.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerandomizeOutcome {
    pub estimate: Option<Rat>,
    pub draws: usize,
    pub rejected_easy: usize,
}

/// Draw uniform strings until one lies in Q, zero-pad it to the next
/// power of two as a truth table (optionally insisting the table is hard),
/// then estimate the target circuit's acceptance as the fraction of seeds
/// on which it accepts the truncated generator output.
pub fn derandomize_via_sampled_hardness(
    q: &dyn Property,
    target: &BooleanCircuit,
    params: &DerandomizeParams,
    rng: &mut dyn Rng,
    limits: &Limits,
) -> Result<DerandomizeOutcome> {
    if params.sample_len == 0 {
        return Err(Error::input("sample length must be positive"));
    }
    if target.arity() > params.nw.output_length {
        return Err(Error::input(format!(
            "target reads {} bits, generator only emits {}",
            target.arity(),
            params.nw.output_length
        )));
    }
    let mut rejected_easy = 0usize;
    for draw in 1..=params.max_draws {
        let z = uniform_bits(rng, params.sample_len);
        if !q.contains(&z)? {
            continue;
        }
        let table_len = params.sample_len.next_power_of_two().max(2);
        let mut bits = z;
        while bits.len() < table_len {
            bits.push(false);
        }
        let table = TruthTable::from_bits(bits)?;
        if let Some(bound) = params.hardness_threshold {
            if complexity_within(&table, bound, limits)? {
                rejected_easy += 1;
                continue;
            }
        }
        let design = build_design(
            params.nw.output_length,
            table.arity(),
            params.nw.max_intersection,
            limits,
        )?;
        let gen = NWGenerator::new(table, design)?;
        let seeds = 1u64 << gen.seed_length();
        if gen.seed_length() > limits.max_seed_len {
            return Err(Error::limit(format!(
                "derandomizer would enumerate 2^{} seeds, above the 2^{} cap",
                gen.seed_length(),
                limits.max_seed_len
            )));
        }
        let mut accepted = 0i128;
        for value in 0..seeds {
            let seed = BitString::from_value(value, gen.seed_length());
            let out = crate::nwgen::nw_generate(&gen, &seed)?;
            if target.eval(&out.left(target.arity())?)? {
                accepted += 1;
            }
        }
        return Ok(DerandomizeOutcome {
            estimate: Some(Rat::new(accepted, seeds as i128)),
            draws: draw,
            rejected_easy,
        });
    }
    Ok(DerandomizeOutcome { estimate: None, draws: params.max_draws, rejected_easy })
}

/// Which phase of the two-phase constructor produced the answer.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Phase {
    Deterministic,
    Probabilistic,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Deterministic => "deterministic",
            Phase::Probabilistic => "probabilistic",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoPhaseOutcome {
    pub phase: Phase,
    pub value: Option<BitString>,
}

/// Deterministic-first construction: scan the truncated-truth-table
/// hitting set for a member of Q; only if that misses, fall back to the
/// randomized pipeline with the given truth-table producer.
pub fn two_phase_construct(
    n: usize,
    q: &dyn Property,
    easy_gates: usize,
    fallback: &mut dyn RandomizedProducer,
    nw: &NwParams,
    rng: &mut dyn Rng,
    limits: &Limits,
) -> Result<TwoPhaseOutcome> {
    let h = build_easy_hitting_set(n, easy_gates, limits)?;
    if let Some(value) = first_member(&h, q)? {
        return Ok(TwoPhaseOutcome { phase: Phase::Deterministic, value: Some(value) });
    }
    let value = pseudodeterministic_construct(fallback, q, n, nw, rng, limits)?;
    Ok(TwoPhaseOutcome { phase: Phase::Probabilistic, value })
}
