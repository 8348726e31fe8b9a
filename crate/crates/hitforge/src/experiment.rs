//! Reproducible experiment reports.
//!
//! Every tool invocation is described by a command name plus string
//! parameters, and produces a report: the normalized parameters (defaults
//! filled in, so the report is self-contained) followed by the outputs in
//! emission order. Reports serialize to a line-oriented `key=value` text
//! with a stable field order, parse back, and can be replayed: the same
//! command is re-executed from the recorded parameters and the two output
//! lists are compared field by field. File-producing commands digest the
//! file contents into the outputs rather than recording paths, so replay
//! verdicts never depend on where a file happened to live.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bits::BitString;
use crate::capp::{self, EstimateMethod};
use crate::circuits::BooleanCircuit;
use crate::config::Limits;
use crate::constructor::{
    amplify, derandomize_via_sampled_hardness, parse_producer, purify_with, two_phase_construct,
    DerandomizeParams, NwParams, PurifierConfig,
};
use crate::easy_witness::{build_easy_hitting_set, verify_hitting};
use crate::error::{Error, Result};
use crate::hitting::HittingSet;
use crate::nwgen::{build_design, build_nw_hitting_set};
use crate::properties::{self, property_by_spec};
use crate::sampler::{canonical_sample, ensemble_by_spec, SamplerConfig};
use crate::Rat;

/// Bumped whenever the report format or any command's output fields
/// change; replay refuses reports from other versions.
pub const REPORT_VERSION: u32 = 1;

/// A command invocation: name plus key=value parameters.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Invocation {
    pub command: String,
    pub params: BTreeMap<String, String>,
}

impl Invocation {
    pub fn new(command: impl Into<String>) -> Self {
        Invocation { command: command.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }
}

/// The record of one invocation: normalized parameters and ordered
/// outputs. Outputs may repeat a key (element lists); parameters cannot.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Report {
    pub version: u32,
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub outputs: Vec<(String, String)>,
}

fn check_key(key: &str) -> Result<()> {
    let ok = !key.is_empty()
        && key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '.');
    if !ok {
        return Err(Error::parse(format!("report keys are lowercase kebab words, got {key:?}")));
    }
    Ok(())
}

fn check_value(value: &str) -> Result<()> {
    if value.contains('\n') || value.contains('\r') {
        return Err(Error::parse("report values are single-line"));
    }
    Ok(())
}

impl Report {
    /// The reserved `status` output; "success" when a command emitted none.
    pub fn status(&self) -> &str {
        self.outputs
            .iter()
            .rev()
            .find(|(k, _)| k == "status")
            .map(|(_, v)| v.as_str())
            .unwrap_or("success")
    }

    /// First output value under the key, if any.
    pub fn output(&self, key: &str) -> Option<&str> {
        self.outputs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Line-oriented serialization: version, command, sorted `param.*`
    /// lines, then outputs in emission order.
    pub fn to_text(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("version={}\n", self.version));
        check_value(&self.command)?;
        out.push_str(&format!("command={}\n", self.command));
        for (k, v) in &self.params {
            check_key(k)?;
            check_value(v)?;
            out.push_str(&format!("param.{k}={v}\n"));
        }
        for (k, v) in &self.outputs {
            check_key(k)?;
            check_value(v)?;
            out.push_str(&format!("{k}={v}\n"));
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Report> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut split = |expect: &str| -> Result<String> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| Error::parse(format!("report ended before the {expect} line")))?;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}: expected key=value", i + 1)))?;
            if key != expect {
                return Err(Error::parse(format!("line {}: expected {expect}=, got {key}=", i + 1)));
            }
            Ok(value.to_string())
        };
        let version: u32 = split("version")?
            .parse()
            .map_err(|_| Error::parse("version is not an integer"))?;
        let command = split("command")?;
        let mut params = BTreeMap::new();
        let mut outputs = Vec::new();
        for (i, line) in lines {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {}: expected key=value", i + 1)))?;
            if let Some(name) = key.strip_prefix("param.") {
                if !outputs.is_empty() {
                    return Err(Error::parse(format!(
                        "line {}: parameters must precede outputs",
                        i + 1
                    )));
                }
                if params.insert(name.to_string(), value.to_string()).is_some() {
                    return Err(Error::parse(format!("duplicate parameter {name}")));
                }
            } else {
                outputs.push((key.to_string(), value.to_string()));
            }
        }
        Ok(Report { version, command, params, outputs })
    }

    /// Structured twin of the text format; emit-only.
    pub fn to_json(&self) -> String {
        fn esc(s: &str) -> String {
            let mut out = String::with_capacity(s.len() + 2);
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                    c => out.push(c),
                }
            }
            out
        }
        let mut s = String::new();
        s.push_str(&format!("{{\"version\":{},\"command\":\"{}\",\"params\":{{", self.version, esc(&self.command)));
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("\"{}\":\"{}\"", esc(k), esc(v)));
        }
        s.push_str("},\"outputs\":[");
        for (i, (k, v)) in self.outputs.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("[\"{}\",\"{}\"]", esc(k), esc(v)));
        }
        s.push_str("]}");
        s
    }
}

/// 64-bit FNV-1a digest, printed as 16 hex digits in reports.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Parameter reader that fills defaults into the map (so the report is
/// explicit) and flags unknown keys.
struct Params {
    map: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl Params {
    fn new(map: &BTreeMap<String, String>) -> Self {
        Params { map: map.clone(), used: BTreeSet::new() }
    }

    fn default(&mut self, key: &str, value: impl Into<String>) {
        self.map.entry(key.to_string()).or_insert_with(|| value.into());
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.used.insert(key.to_string());
        self.map
            .get(key)
            .cloned()
            .ok_or_else(|| Error::parse(format!("missing required parameter {key}")))
    }

    fn opt(&mut self, key: &str) -> Option<String> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn usize(&mut self, key: &str) -> Result<usize> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::parse(format!("parameter {key}={v} is not a count")))
    }

    fn u64(&mut self, key: &str) -> Result<u64> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::parse(format!("parameter {key}={v} is not an integer")))
    }

    fn bits(&mut self, key: &str) -> Result<BitString> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::parse(format!("parameter {key} is not a bit string")))
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        let unknown: Vec<&String> =
            self.map.keys().filter(|k| !self.used.contains(*k)).collect();
        if !unknown.is_empty() {
            return Err(Error::parse(format!("unknown parameters: {unknown:?}")));
        }
        Ok(self.map)
    }
}

fn rat_str(r: Rat) -> String {
    if r.denom() == &1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_fraction(s: &str) -> Result<(usize, usize)> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| Error::parse(format!("expected <num>/<den>, got {s:?}")))?;
    let num = num.parse().map_err(|_| Error::parse(format!("bad numerator {num:?}")))?;
    let den: usize = den.parse().map_err(|_| Error::parse(format!("bad denominator {den:?}")))?;
    if den == 0 {
        return Err(Error::parse("denominator must be positive"));
    }
    Ok((num, den))
}

fn value_or_bot(out: &mut Vec<(String, String)>, value: &Option<BitString>) {
    match value {
        Some(v) => {
            out.push(("value".into(), v.to_string()));
            out.push(("status".into(), "success".into()));
        }
        None => {
            out.push(("value".into(), "bot".into()));
            out.push(("status".into(), "miss".into()));
        }
    }
}

fn emit_hitting_set(
    out: &mut Vec<(String, String)>,
    h: &HittingSet,
    save_to: Option<&str>,
) -> Result<()> {
    let mut text = Vec::new();
    h.write_to(&mut text)?;
    out.push(("count".into(), h.len().to_string()));
    out.push(("set.digest".into(), format!("{:016x}", fnv1a64(&text))));
    if h.len() <= 32 {
        for e in h.elements() {
            out.push(("element".into(), e.to_string()));
        }
    }
    if let Some(path) = save_to {
        std::fs::write(path, &text).map_err(Error::Io)?;
    }
    Ok(())
}

fn rng_from(p: &mut Params) -> Result<ChaCha12Rng> {
    p.default("seed", "0");
    Ok(ChaCha12Rng::seed_from_u64(p.u64("seed")?))
}

/// Truth-table producer used when a command needs a fallback table and the
/// invocation does not name one: a fixed 16-bit parity table, hard enough
/// for every generator in the desk-scale envelope and fully deterministic.
pub const DEFAULT_TABLE_PRODUCER: &str = "fixed:0110100110010110";

fn cmd_easy_hit(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let n = p.usize("n")?;
    let gates = p.usize("gates")?;
    let out_path = p.opt("out");
    let h = build_easy_hitting_set(n, gates, limits)?;
    let mut out = Vec::new();
    emit_hitting_set(&mut out, &h, out_path.as_deref())?;
    out.push(("status".into(), "success".into()));
    Ok(out)
}

fn cmd_nw_hit(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let n = p.usize("n")?;
    let table = crate::circuits::TruthTable::from_bits(p.bits("table")?)?;
    p.default("r", n.to_string());
    p.default("t", "2");
    let r = p.usize("r")?;
    let t = p.usize("t")?;
    let out_path = p.opt("out");
    let (h, gen) = build_nw_hitting_set(&table, n, r, t, limits)?;
    let mut out = Vec::new();
    out.push(("seed-length".into(), gen.seed_length().to_string()));
    emit_hitting_set(&mut out, &h, out_path.as_deref())?;
    out.push(("status".into(), "success".into()));
    Ok(out)
}

fn cmd_design(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let r = p.usize("sets")?;
    let m = p.usize("set-size")?;
    let t = p.usize("overlap")?;
    let out_path = p.opt("out");
    let d = build_design(r, m, t, limits)?;
    let mut text = Vec::new();
    d.write_to(&mut text)?;
    let mut out = Vec::new();
    out.push(("universe".into(), d.universe_size().to_string()));
    out.push(("sets".into(), d.sets().len().to_string()));
    out.push(("design.digest".into(), format!("{:016x}", fnv1a64(&text))));
    if d.sets().len() <= 16 {
        for s in d.sets() {
            let line: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
            out.push(("set".into(), line.join(",")));
        }
    }
    if let Some(path) = out_path {
        std::fs::write(path, &text).map_err(Error::Io)?;
    }
    out.push(("status".into(), "success".into()));
    Ok(out)
}

fn run_two_phase(p: &mut Params, limits: &Limits, property: &str) -> Result<Vec<(String, String)>> {
    let n = p.usize("n")?;
    p.default("gates", "7");
    p.default("producer", DEFAULT_TABLE_PRODUCER);
    p.default("r", n.to_string());
    p.default("t", "2");
    let gates = p.usize("gates")?;
    let mut producer = parse_producer(&p.require("producer")?)?;
    let nw = NwParams { output_length: p.usize("r")?, max_intersection: p.usize("t")? };
    let mut rng = rng_from(p)?;
    let q = property_by_spec(property);
    let outcome = two_phase_construct(n, q.as_ref(), gates, producer.as_mut(), &nw, &mut rng, limits)?;
    let mut out = Vec::new();
    out.push(("phase".into(), outcome.phase.to_string()));
    value_or_bot(&mut out, &outcome.value);
    Ok(out)
}

fn cmd_construct_prime(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    run_two_phase(p, limits, "primes")
}

fn cmd_construct(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let property = p.require("property")?;
    run_two_phase(p, limits, &property)
}

fn cmd_purify(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let _ = limits;
    let n = p.usize("n")?;
    let mut producer = parse_producer(&p.require("producer")?)?;
    p.default("trials", (n * n).to_string());
    p.default("threshold", "3/5");
    let trials = p.usize("trials")?;
    let (threshold_num, threshold_den) = parse_fraction(&p.require("threshold")?)?;
    let mut rng = rng_from(p)?;
    let config =
        PurifierConfig { trials: Some(trials), threshold_num, threshold_den };
    let purified = purify_with(producer.as_mut(), n, &mut rng, &config)?;
    let mut out = Vec::new();
    out.push(("trials".into(), purified.trial_count.to_string()));
    out.push(("winner-count".into(), purified.winner_count.to_string()));
    value_or_bot(&mut out, &purified.value);
    Ok(out)
}

fn cmd_amplify(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let _ = limits;
    let n = p.usize("n")?;
    let mut producer = parse_producer(&p.require("producer")?)?;
    p.default("reps", n.to_string());
    let reps = p.usize("reps")?;
    let mut rng = rng_from(p)?;
    let value = amplify(producer.as_mut(), n, reps, &mut rng)?;
    let mut out = Vec::new();
    out.push(("reps".into(), reps.to_string()));
    value_or_bot(&mut out, &value);
    Ok(out)
}

fn cmd_derandomize(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let q = property_by_spec(&p.require("property")?);
    let circuit: BooleanCircuit = p.require("circuit")?.parse()?;
    p.default("sample-len", "4");
    p.default("max-draws", "64");
    p.default("r", circuit.arity().to_string());
    p.default("t", "2");
    let params = DerandomizeParams {
        sample_len: p.usize("sample-len")?,
        max_draws: p.usize("max-draws")?,
        hardness_threshold: match p.opt("threshold") {
            Some(v) => Some(
                v.parse()
                    .map_err(|_| Error::parse(format!("threshold {v:?} is not a gate count")))?,
            ),
            None => None,
        },
        nw: NwParams { output_length: p.usize("r")?, max_intersection: p.usize("t")? },
    };
    let mut rng = rng_from(p)?;
    let outcome = derandomize_via_sampled_hardness(q.as_ref(), &circuit, &params, &mut rng, limits)?;
    let mut out = Vec::new();
    out.push(("draws".into(), outcome.draws.to_string()));
    out.push(("rejected-easy".into(), outcome.rejected_easy.to_string()));
    match outcome.estimate {
        Some(e) => {
            out.push(("estimate".into(), rat_str(e)));
            out.push(("status".into(), "success".into()));
        }
        None => {
            out.push(("estimate".into(), "bot".into()));
            out.push(("status".into(), "miss".into()));
        }
    }
    Ok(out)
}

fn cmd_capp(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let circuit: BooleanCircuit = p.require("circuit")?.parse()?;
    let set_path = p.opt("set");
    let mut out = Vec::new();
    match set_path {
        None => {
            let e = capp::exact_acceptance(&circuit, limits)?;
            out.push(("method".into(), "exact".into()));
            out.push(("estimate".into(), rat_str(e)));
        }
        Some(path) => {
            let h = HittingSet::load(Path::new(&path))?;
            let estimate = capp::capp_estimate(&circuit, &h)?;
            let method = match estimate.method {
                EstimateMethod::Exact => "exact".to_string(),
                EstimateMethod::SetBased(prov) => format!("set:{prov}"),
            };
            out.push(("method".into(), method));
            out.push(("estimate".into(), rat_str(estimate.value)));
        }
    }
    out.push(("status".into(), "success".into()));
    Ok(out)
}

fn cmd_discrepancy(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let q = property_by_spec(&p.require("property")?);
    let n = p.usize("n")?;
    let h = HittingSet::load(Path::new(&p.require("set")?))?;
    let disc = capp::discrepancy(&h, q.as_ref(), n, limits)?;
    let dens = properties::density(q.as_ref(), n, limits)?;
    let mut out = Vec::new();
    out.push(("density".into(), rat_str(dens)));
    out.push(("discrepancy".into(), rat_str(disc)));
    out.push(("status".into(), "success".into()));
    Ok(out)
}

fn cmd_density(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let q = property_by_spec(&p.require("property")?);
    let n = p.usize("n")?;
    let dens = properties::density(q.as_ref(), n, limits)?;
    let mut out = Vec::new();
    out.push(("density".into(), rat_str(dens)));
    if let Some(claimed) = q.claimed_density(n) {
        out.push(("claimed".into(), rat_str(claimed)));
        out.push(("meets-claim".into(), (dens >= claimed).to_string()));
    }
    out.push(("status".into(), "success".into()));
    Ok(out)
}

fn cmd_sample_canonical(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let ensemble = ensemble_by_spec(&p.require("ensemble")?)?;
    let n = p.usize("n")?;
    p.default("gates", "7");
    p.default("t", "2");
    p.default("producer", DEFAULT_TABLE_PRODUCER);
    let config = SamplerConfig { easy_gates: p.usize("gates")?, max_intersection: p.usize("t")? };
    let mut producer = parse_producer(&p.require("producer")?)?;
    let mut rng = rng_from(p)?;
    let outcome =
        canonical_sample(ensemble.as_ref(), n, &config, producer.as_mut(), &mut rng, limits)?;
    let mut out = Vec::new();
    for d in &outcome.diagnostics {
        out.push(("skipped".into(), format!("{}: {}", d.length, d.detail)));
    }
    if let Some(m) = outcome.chosen_length {
        out.push(("chosen-length".into(), m.to_string()));
    }
    value_or_bot(&mut out, &outcome.value);
    Ok(out)
}

fn cmd_verify_hit(p: &mut Params, limits: &Limits) -> Result<Vec<(String, String)>> {
    let _ = limits;
    let q = property_by_spec(&p.require("property")?);
    let h = HittingSet::load(Path::new(&p.require("set")?))?;
    let witness = verify_hitting(&h, q.as_ref())?;
    let mut out = Vec::new();
    match witness {
        Some(w) => {
            out.push(("witness".into(), w.to_string()));
            out.push(("status".into(), "success".into()));
        }
        None => {
            out.push(("witness".into(), "none".into()));
            out.push(("status".into(), "miss".into()));
        }
    }
    Ok(out)
}

/// Execute one invocation and return its report. Defaults are written
/// back into the report's parameters, so re-running a report never depends
/// on ambient state other than referenced input files.
pub fn run(invocation: &Invocation, limits: &Limits) -> Result<Report> {
    let mut p = Params::new(&invocation.params);
    let outputs = match invocation.command.as_str() {
        "easy-hit" => cmd_easy_hit(&mut p, limits)?,
        "nw-hit" => cmd_nw_hit(&mut p, limits)?,
        "design" => cmd_design(&mut p, limits)?,
        "construct-prime" => cmd_construct_prime(&mut p, limits)?,
        "construct" => cmd_construct(&mut p, limits)?,
        "purify" => cmd_purify(&mut p, limits)?,
        "amplify" => cmd_amplify(&mut p, limits)?,
        "derandomize" => cmd_derandomize(&mut p, limits)?,
        "capp" => cmd_capp(&mut p, limits)?,
        "discrepancy" => cmd_discrepancy(&mut p, limits)?,
        "density" => cmd_density(&mut p, limits)?,
        "sample-canonical" => cmd_sample_canonical(&mut p, limits)?,
        "verify-hit" => cmd_verify_hit(&mut p, limits)?,
        other => return Err(Error::parse(format!("unknown command {other:?}"))),
    };
    Ok(Report {
        version: REPORT_VERSION,
        command: invocation.command.clone(),
        params: p.finish()?,
        outputs,
    })
}

/// Replay verdict: either every output field matched, or the first
/// mismatch with both values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReplayVerdict {
    Identical,
    Divergent { field: String, recorded: String, replayed: String },
}

static REPLAY_COUNTER: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

fn replay_scratch_path() -> PathBuf {
    let stamp = REPLAY_COUNTER.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    std::env::temp_dir().join(format!("hitforge-replay-{}-{stamp}.tmp", std::process::id()))
}

/// Re-execute a report's command from its recorded parameters and compare
/// the outputs. Output files are rewritten to a scratch path (their
/// digests, not their locations, are what the outputs record). Reports
/// from other tool versions are refused.
pub fn replay(report: &Report, limits: &Limits) -> Result<ReplayVerdict> {
    if report.version != REPORT_VERSION {
        return Err(Error::Incompatible(format!(
            "report version {} does not match tool report version {REPORT_VERSION}",
            report.version
        )));
    }
    let mut params = report.params.clone();
    let mut scratch: Option<PathBuf> = None;
    if params.contains_key("out") {
        let path = replay_scratch_path();
        params.insert("out".into(), path.to_string_lossy().into_owned());
        scratch = Some(path);
    }
    let invocation = Invocation { command: report.command.clone(), params };
    let rerun = run(&invocation, limits);
    if let Some(path) = scratch {
        let _ = std::fs::remove_file(path);
    }
    let rerun = rerun?;
    for (i, recorded) in report.outputs.iter().enumerate() {
        match rerun.outputs.get(i) {
            None => {
                return Ok(ReplayVerdict::Divergent {
                    field: recorded.0.clone(),
                    recorded: recorded.1.clone(),
                    replayed: "<absent>".into(),
                })
            }
            Some(replayed) => {
                if recorded != replayed {
                    return Ok(ReplayVerdict::Divergent {
                        field: recorded.0.clone(),
                        recorded: format!("{}={}", recorded.0, recorded.1),
                        replayed: format!("{}={}", replayed.0, replayed.1),
                    });
                }
            }
        }
    }
    if rerun.outputs.len() > report.outputs.len() {
        let extra = &rerun.outputs[report.outputs.len()];
        return Ok(ReplayVerdict::Divergent {
            field: extra.0.clone(),
            recorded: "<absent>".into(),
            replayed: format!("{}={}", extra.0, extra.1),
        });
    }
    Ok(ReplayVerdict::Identical)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn report_text_round_trips() {
        let report = Report {
            version: REPORT_VERSION,
            command: "density".into(),
            params: BTreeMap::from([
                ("n".to_string(), "4".to_string()),
                ("property".to_string(), "incompressible:zero-chain".to_string()),
            ]),
            outputs: vec![
                ("density".into(), "15/16".into()),
                ("note".into(), "a=b=c".into()),
                ("status".into(), "success".into()),
            ],
        };
        let text = report.to_text().unwrap();
        assert_eq!(Report::from_text(&text).unwrap(), report);
        assert!(text.starts_with("version=1\ncommand=density\n"));
        assert!(text.contains("param.n=4\n"));
        assert!(text.contains("note=a=b=c\n"));
    }

    #[test]
    fn report_text_is_strict() {
        assert!(Report::from_text("command=x\nversion=1\n").is_err());
        assert!(Report::from_text("version=one\ncommand=x\n").is_err());
        let bad = Report {
            version: 1,
            command: "density".into(),
            params: BTreeMap::new(),
            outputs: vec![("value".into(), "two\nlines".into())],
        };
        assert!(bad.to_text().is_err());
        let bad_key = Report {
            version: 1,
            command: "density".into(),
            params: BTreeMap::new(),
            outputs: vec![("Value!".into(), "x".into())],
        };
        assert!(bad_key.to_text().is_err());
        // Parameters after outputs are rejected: outputs are ordered,
        // parameters are a map, and mixing them would lose the order.
        assert!(Report::from_text("version=1\ncommand=x\nvalue=1\nparam.n=2\n").is_err());
    }

    #[test]
    fn json_twin_escapes_metacharacters() {
        let report = Report {
            version: 1,
            command: "density".into(),
            params: BTreeMap::from([("property".to_string(), "say \"hi\"\\".to_string())]),
            outputs: vec![("status".into(), "success".into())],
        };
        assert_eq!(
            report.to_json(),
            "{\"version\":1,\"command\":\"density\",\"params\":{\"property\":\"say \\\"hi\\\"\\\\\"},\"outputs\":[[\"status\",\"success\"]]}"
        );
    }

    #[test]
    fn digest_matches_known_values() {
        // Standard FNV-1a test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn easy_hit_reports_small_sets_inline() {
        let inv = Invocation::new("easy-hit").with("n", "2").with("gates", "0");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("count"), Some("3"));
        let elements: Vec<&str> = report
            .outputs
            .iter()
            .filter(|(k, _)| k == "element")
            .map(|(_, v)| v.as_str())
            .collect();
        assert_eq!(elements, ["00", "01", "11"]);
        assert_eq!(report.status(), "success");
        assert_eq!(replay(&report, &limits()).unwrap(), ReplayVerdict::Identical);
    }

    #[test]
    fn construct_prime_finds_the_least_prime() {
        let inv = Invocation::new("construct-prime").with("n", "4").with("seed", "3");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("phase"), Some("deterministic"));
        assert_eq!(report.output("value"), Some("1011"));
        assert_eq!(report.status(), "success");
        // Defaults are materialized into the report parameters.
        assert_eq!(report.params.get("gates").map(String::as_str), Some("7"));
        assert_eq!(report.params.get("producer").map(String::as_str), Some(DEFAULT_TABLE_PRODUCER));
        assert_eq!(replay(&report, &limits()).unwrap(), ReplayVerdict::Identical);
    }

    #[test]
    fn purify_reports_counts_and_misses() {
        let inv = Invocation::new("purify")
            .with("producer", "fixed:1100")
            .with("n", "4")
            .with("seed", "1");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("trials"), Some("16"));
        assert_eq!(report.output("winner-count"), Some("16"));
        assert_eq!(report.output("value"), Some("1100"));
        let inv = Invocation::new("purify")
            .with("producer", "biased:1100@0/1")
            .with("n", "4");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("value"), Some("bot"));
        assert_eq!(report.status(), "miss");
    }

    #[test]
    fn capp_and_density_report_exact_rationals() {
        let inv = Invocation::new("capp").with("circuit", "k=2;g=AND(0,1);out=4");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("estimate"), Some("1/4"));
        assert_eq!(report.output("method"), Some("exact"));
        let inv = Invocation::new("density").with("property", "primes").with("n", "8");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("density"), Some("23/256"));
        assert_eq!(report.output("claimed"), Some("1/16"));
        assert_eq!(report.output("meets-claim"), Some("true"));
        assert_eq!(replay(&report, &limits()).unwrap(), ReplayVerdict::Identical);
    }

    #[test]
    fn out_files_are_digested_not_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.hs");
        let inv = Invocation::new("easy-hit")
            .with("n", "3")
            .with("gates", "1")
            .with("out", path.to_str().unwrap());
        let report = run(&inv, &limits()).unwrap();
        let written = std::fs::read(&path).unwrap();
        let digest = format!("{:016x}", fnv1a64(&written));
        assert_eq!(report.output("set.digest"), Some(digest.as_str()));
        assert!(report.outputs.iter().all(|(_, v)| !v.contains(path.to_str().unwrap())));
        // The file parses back as a hitting set.
        assert!(HittingSet::load(&path).is_ok());
        // Replay rewrites to scratch, so it works after the original is gone.
        drop(dir);
        assert_eq!(replay(&report, &limits()).unwrap(), ReplayVerdict::Identical);
    }

    #[test]
    fn tampered_seed_is_flagged_divergent() {
        // A two-value amplifier depends on its seed; find two seeds with
        // different outputs, record under one, replay under the other.
        let base = |seed: u64| {
            Invocation::new("amplify")
                .with("producer", "two:00/11")
                .with("n", "2")
                .with("reps", "3")
                .with("seed", seed.to_string())
        };
        let first = run(&base(0), &limits()).unwrap();
        let mut other = None;
        for seed in 1..64 {
            let r = run(&base(seed), &limits()).unwrap();
            if r.output("value") != first.output("value") {
                other = Some(seed);
                break;
            }
        }
        let other = other.expect("some seed gives the other majority");
        let mut tampered = first.clone();
        tampered.params.insert("seed".into(), other.to_string());
        match replay(&tampered, &limits()).unwrap() {
            ReplayVerdict::Divergent { field, .. } => assert_eq!(field, "value"),
            v => panic!("expected divergence, got {v:?}"),
        }
        // Untampered reports replay identically.
        assert_eq!(replay(&first, &limits()).unwrap(), ReplayVerdict::Identical);
    }

    #[test]
    fn replay_refuses_other_versions() {
        let mut report = run(
            &Invocation::new("density").with("property", "all").with("n", "3"),
            &limits(),
        )
        .unwrap();
        report.version = REPORT_VERSION + 1;
        assert!(matches!(replay(&report, &limits()), Err(Error::Incompatible(_))));
    }

    #[test]
    fn unknown_commands_and_parameters_are_rejected() {
        let err = run(&Invocation::new("mystery"), &limits()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = run(
            &Invocation::new("density")
                .with("property", "all")
                .with("n", "3")
                .with("tyop", "1"),
            &limits(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = run(&Invocation::new("density").with("property", "all"), &limits()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn design_and_verify_hit_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let d_path = dir.path().join("d.design");
        let inv = Invocation::new("design")
            .with("sets", "3")
            .with("set-size", "2")
            .with("overlap", "1")
            .with("out", d_path.to_str().unwrap());
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("sets"), Some("3"));
        assert!(crate::nwgen::CombinatorialDesign::load(&d_path).is_ok());

        let h_path = dir.path().join("h.hs");
        run(
            &Invocation::new("easy-hit")
                .with("n", "4")
                .with("gates", "7")
                .with("out", h_path.to_str().unwrap()),
            &limits(),
        )
        .unwrap();
        let report = run(
            &Invocation::new("verify-hit")
                .with("set", h_path.to_str().unwrap())
                .with("property", "primes"),
            &limits(),
        )
        .unwrap();
        assert_eq!(report.output("witness"), Some("1011"));
        assert_eq!(report.status(), "success");
        let report = run(
            &Invocation::new("discrepancy")
                .with("set", h_path.to_str().unwrap())
                .with("property", "all")
                .with("n", "4"),
            &limits(),
        )
        .unwrap();
        assert_eq!(report.output("discrepancy"), Some("0"));
    }

    #[test]
    fn sample_canonical_runs_end_to_end() {
        let inv = Invocation::new("sample-canonical")
            .with("ensemble", "banner")
            .with("n", "2")
            .with("seed", "4");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("value"), Some("11"));
        assert_eq!(report.output("chosen-length"), Some("4"));
        assert_eq!(replay(&report, &limits()).unwrap(), ReplayVerdict::Identical);
    }

    #[test]
    fn derandomize_reports_draws_and_estimate() {
        let inv = Invocation::new("derandomize")
            .with("property", "all")
            .with("circuit", "k=2;g=OR(0,1);out=4")
            .with("sample-len", "4")
            .with("seed", "11");
        let report = run(&inv, &limits()).unwrap();
        assert_eq!(report.output("draws"), Some("1"));
        assert!(report.output("estimate").is_some());
        assert_eq!(replay(&report, &limits()).unwrap(), ReplayVerdict::Identical);
    }
}
