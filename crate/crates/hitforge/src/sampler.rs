//! Canonical sampling from samplable ensembles.
//!
//! An ensemble is described by a deterministic sampler g that turns a
//! target length n and a random string of length n^c into either an n-bit
//! sample or the failure symbol ⋄, failing with probability at most
//! 1 − 1/n^k. Lengths are partitioned into the intervals
//! [i^c, (i+1)^c − 1]; strings whose first i^c bits make g succeed form a
//! dense property, and running the canonical constructor on that property
//! at each length of the interval in turn yields a canonical random
//! string, hence a canonical sample.

use rand::Rng;

use crate::bits::BitString;
use crate::config::Limits;
use crate::constructor::{two_phase_construct, NwParams, RandomizedProducer};
use crate::error::{Error, Result};
use crate::properties::Property;
use crate::Rat;

/// A samplable ensemble: deterministic sampler g over explicit random
/// strings, with its randomness exponent c and non-failure exponent k.
/// `sample` returns None for the failure symbol ⋄.
pub trait Ensemble {
    fn name(&self) -> &str;
    /// c: a sample at length n consumes exactly n^c random bits.
    fn randomness_exponent(&self) -> u32;
    /// k: g succeeds with probability at least 1/n^k over the random string.
    fn nonfailure_exponent(&self) -> u32;
    fn sample(&self, n: usize, w: &BitString) -> Result<Option<BitString>>;
    /// Whether x can ever be emitted at length n.
    fn range_contains(&self, n: usize, x: &BitString) -> Result<bool>;
}

fn pow_len(base: usize, exp: u32) -> Result<usize> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::limit(format!("{base}^{exp} overflows a machine word")))
}

/// The integer interval [i^c, (i+1)^c − 1], inclusive. These intervals
/// partition the positive integers as i ranges over 1, 2, 3, ...
pub fn interval_of(i: usize, c: u32) -> Result<(usize, usize)> {
    if i == 0 || c == 0 {
        return Err(Error::input("interval indices and exponents start at 1"));
    }
    let lo = pow_len(i, c)?;
    let hi = pow_len(i + 1, c)? - 1;
    Ok((lo, hi))
}

/// The unique i with i^c ≤ m < (i+1)^c.
pub fn index_of_length(m: usize, c: u32) -> Result<usize> {
    if m == 0 || c == 0 {
        return Err(Error::input("lengths and exponents start at 1"));
    }
    let mut i = 1usize;
    loop {
        let next = pow_len(i + 1, c)?;
        if m < next {
            return Ok(i);
        }
        i += 1;
    }
}

/// The dense property induced by an ensemble: a string x of length
/// m ∈ [i^c, (i+1)^c − 1] belongs exactly when g succeeds at target
/// length i on the first i^c bits of x.
pub struct EnsembleProperty<'a> {
    ensemble: &'a dyn Ensemble,
    label: String,
}

impl<'a> EnsembleProperty<'a> {
    pub fn new(ensemble: &'a dyn Ensemble) -> Self {
        let label = format!("ensemble:{}", ensemble.name());
        EnsembleProperty { ensemble, label }
    }
}

impl Property for EnsembleProperty<'_> {
    fn name(&self) -> &str {
        &self.label
    }

    fn contains(&self, x: &BitString) -> Result<bool> {
        if x.is_empty() {
            return Err(Error::input("the induced property is over nonempty strings"));
        }
        let c = self.ensemble.randomness_exponent();
        let i = index_of_length(x.len(), c)?;
        let w = x.left(pow_len(i, c)?)?;
        Ok(self.ensemble.sample(i, &w)?.is_some())
    }

    fn claimed_density(&self, n: usize) -> Option<Rat> {
        let c = self.ensemble.randomness_exponent();
        let i = index_of_length(n, c).ok()?;
        let denom = (i as i128).checked_pow(self.ensemble.nonfailure_exponent())?;
        Some(Rat::new(1, denom))
    }
}

/// Constructor tuning for the sampler: gate budget of the deterministic
/// phase and the pairwise-overlap bound of the fallback generator (whose
/// output length tracks the per-interval target length).
#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub easy_gates: usize,
    pub max_intersection: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { easy_gates: 7, max_intersection: 2 }
    }
}

/// One failed interval length and why it failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SampleDiagnostic {
    pub length: usize,
    pub detail: String,
}

/// Result of a canonical-sampling run: the sample (or ⊥), the interval
/// length whose construction succeeded, and one diagnostic per failed
/// length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CanonicalSampleOutcome {
    pub value: Option<BitString>,
    pub chosen_length: Option<usize>,
    pub diagnostics: Vec<SampleDiagnostic>,
}

/// Construct a canonical member of the induced property at each length of
/// the interval [n^c, (n+1)^c − 1] in increasing order; at the first
/// length that yields a string, feed its first n^c bits back into g and
/// return the sample. Per-length failures (⊥ or constructor errors) are
/// recorded and the scan continues; ⊥ is returned only if every length
/// fails.
pub fn canonical_sample(
    ensemble: &dyn Ensemble,
    n: usize,
    config: &SamplerConfig,
    fallback: &mut dyn RandomizedProducer,
    rng: &mut dyn Rng,
    limits: &Limits,
) -> Result<CanonicalSampleOutcome> {
    if n < 1 {
        return Err(Error::input("target length must be at least 1"));
    }
    let c = ensemble.randomness_exponent();
    let (lo, hi) = interval_of(n, c)?;
    let q = EnsembleProperty::new(ensemble);
    let mut diagnostics = Vec::new();
    for m in lo..=hi {
        let nw = NwParams { output_length: m, max_intersection: config.max_intersection };
        match two_phase_construct(m, &q, config.easy_gates, fallback, &nw, rng, limits) {
            Ok(outcome) => match outcome.value {
                Some(z) => {
                    let w = z.left(lo)?;
                    let sample = ensemble.sample(n, &w)?.ok_or_else(|| {
                        Error::Incompatible(format!(
                            "sampler failed on a string its induced property accepted (length {m})"
                        ))
                    })?;
                    return Ok(CanonicalSampleOutcome {
                        value: Some(sample),
                        chosen_length: Some(m),
                        diagnostics,
                    });
                }
                None => diagnostics.push(SampleDiagnostic {
                    length: m,
                    detail: "construction returned no value".into(),
                }),
            },
            Err(e) => diagnostics.push(SampleDiagnostic { length: m, detail: e.to_string() }),
        }
    }
    Ok(CanonicalSampleOutcome { value: None, chosen_length: None, diagnostics })
}

/// Ensemble over all n-bit strings: succeeds when the first random bit is
/// 1 and then copies the next n bits, so failure probability is exactly
/// 1/2 (within the 1 − 1/n bound for n ≥ 2).
pub struct CoinLead;

impl Ensemble for CoinLead {
    fn name(&self) -> &str {
        "coin-lead"
    }
    fn randomness_exponent(&self) -> u32 {
        2
    }
    fn nonfailure_exponent(&self) -> u32 {
        1
    }
    fn sample(&self, n: usize, w: &BitString) -> Result<Option<BitString>> {
        if n < 2 {
            return Err(Error::input("this ensemble is defined for lengths at least 2"));
        }
        if w.len() != n * n {
            return Err(Error::input(format!(
                "expected {} random bits for length {n}, got {}",
                n * n,
                w.len()
            )));
        }
        if !w.get(0) {
            return Ok(None);
        }
        Ok(Some(w.slice(1..n + 1)))
    }
    fn range_contains(&self, n: usize, x: &BitString) -> Result<bool> {
        Ok(n >= 2 && x.len() == n)
    }
}

/// Ensemble of strings that start with two ones: succeeds when the first
/// two random bits are ones (probability 1/4, within 1 − 1/n² for n ≥ 2)
/// and keeps them as the sample's header.
pub struct Banner;

impl Ensemble for Banner {
    fn name(&self) -> &str {
        "banner"
    }
    fn randomness_exponent(&self) -> u32 {
        2
    }
    fn nonfailure_exponent(&self) -> u32 {
        2
    }
    fn sample(&self, n: usize, w: &BitString) -> Result<Option<BitString>> {
        if n < 2 {
            return Err(Error::input("this ensemble is defined for lengths at least 2"));
        }
        if w.len() != n * n {
            return Err(Error::input(format!(
                "expected {} random bits for length {n}, got {}",
                n * n,
                w.len()
            )));
        }
        if !(w.get(0) && w.get(1)) {
            return Ok(None);
        }
        Ok(Some(w.left(2)?.concat(&w.slice(2..n))))
    }
    fn range_contains(&self, n: usize, x: &BitString) -> Result<bool> {
        Ok(n >= 2 && x.len() == n && x.get(0) && x.get(1))
    }
}

/// An ensemble provided as an executable: `<exe> sample <n>` reads the
/// random string on standard input and prints the sample, or the single
/// character `*` for ⋄.
pub struct ExternalEnsemble {
    path: String,
    label: String,
    c: u32,
    k: u32,
}

impl ExternalEnsemble {
    pub fn new(path: impl Into<String>, c: u32, k: u32) -> Result<Self> {
        if c == 0 {
            return Err(Error::input("randomness exponent must be at least 1"));
        }
        let path = path.into();
        let label = format!("exe:{path}");
        Ok(ExternalEnsemble { path, label, c, k })
    }
}

impl Ensemble for ExternalEnsemble {
    fn name(&self) -> &str {
        &self.label
    }
    fn randomness_exponent(&self) -> u32 {
        self.c
    }
    fn nonfailure_exponent(&self) -> u32 {
        self.k
    }
    fn sample(&self, n: usize, w: &BitString) -> Result<Option<BitString>> {
        if w.len() != pow_len(n, self.c)? {
            return Err(Error::input(format!(
                "expected {} random bits for length {n}, got {}",
                pow_len(n, self.c)?,
                w.len()
            )));
        }
        let args = vec!["sample".to_string(), n.to_string()];
        let (stdout, status) =
            crate::properties::run_plugin(&self.path, &args, &[w.to_string()])?;
        if status != Some(0) {
            return Err(Error::Incompatible(format!(
                "ensemble helper {} exited with status {status:?}",
                self.path
            )));
        }
        let line = stdout.lines().next().unwrap_or("").trim();
        if line == "*" {
            return Ok(None);
        }
        let sample: BitString = line
            .parse()
            .map_err(|_| Error::Incompatible(format!("ensemble helper printed {line:?}")))?;
        if sample.len() != n {
            return Err(Error::Incompatible(format!(
                "ensemble helper returned {} bits for length {n}",
                sample.len()
            )));
        }
        Ok(Some(sample))
    }
    fn range_contains(&self, _n: usize, _x: &BitString) -> Result<bool> {
        Err(Error::Incompatible(
            "external ensembles do not expose a range check".into(),
        ))
    }
}

/// Resolve an ensemble description: `coin-lead`, `banner`, or
/// `exe:<path>@<c>/<k>` for a plug-in executable with explicit exponents.
pub fn ensemble_by_spec(spec: &str) -> Result<Box<dyn Ensemble>> {
    match spec {
        "coin-lead" => Ok(Box::new(CoinLead)),
        "banner" => Ok(Box::new(Banner)),
        other => {
            if let Some(rest) = other.strip_prefix("exe:") {
                let (path, tail) = rest.split_once('@').ok_or_else(|| {
                    Error::parse("external ensembles are written exe:<path>@<c>/<k>")
                })?;
                let (c, k) = tail
                    .split_once('/')
                    .ok_or_else(|| Error::parse("expected <c>/<k> after the path"))?;
                let c: u32 = c.parse().map_err(|_| Error::parse(format!("bad exponent {c:?}")))?;
                let k: u32 = k.parse().map_err(|_| Error::parse(format!("bad exponent {k:?}")))?;
                Ok(Box::new(ExternalEnsemble::new(path, c, k)?))
            } else {
                Err(Error::parse(format!("unknown ensemble {other:?}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::FixedProducer;
    use crate::properties::density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn fallback() -> FixedProducer {
        FixedProducer { value: bits("0110100110010110") }
    }

    #[test]
    fn intervals_partition_the_positive_integers() {
        assert_eq!(interval_of(1, 2).unwrap(), (1, 3));
        assert_eq!(interval_of(3, 2).unwrap(), (9, 15));
        for c in 1..=3u32 {
            let mut expected = 1usize;
            for i in 1..=10usize {
                let (lo, hi) = interval_of(i, c).unwrap();
                assert_eq!(lo, expected, "gap or overlap before {i}^{c}");
                assert!(hi >= lo);
                expected = hi + 1;
            }
            assert_eq!(expected, 11usize.pow(c));
        }
    }

    #[test]
    fn index_of_length_inverts_the_partition() {
        for c in 1..=3u32 {
            for m in 1..=600usize {
                let i = index_of_length(m, c).unwrap();
                let (lo, hi) = interval_of(i, c).unwrap();
                assert!(lo <= m && m <= hi, "length {m} landed outside [{lo},{hi}]");
            }
        }
        assert!(index_of_length(0, 2).is_err());
        assert!(interval_of(0, 2).is_err());
    }

    #[test]
    fn induced_property_reads_the_leading_block() {
        // First-bit failure: the induced property at any length in an
        // interval is "first bit is 1", density exactly 1/2.
        let q = EnsembleProperty::new(&CoinLead);
        assert!(q.contains(&bits("10000")).unwrap());
        assert!(!q.contains(&bits("00000")).unwrap());
        let limits = Limits::default();
        for m in [4usize, 5, 6, 9, 12] {
            assert_eq!(density(&q, m, &limits).unwrap(), Rat::new(1, 2), "length {m}");
        }
        // Banner: first two bits must be ones, density 1/4, and the
        // claimed interval-index bound 1/i² is respected.
        let q = EnsembleProperty::new(&Banner);
        for m in [4usize, 9, 12] {
            let d = density(&q, m, &limits).unwrap();
            assert_eq!(d, Rat::new(1, 4), "length {m}");
            assert!(d >= q.claimed_density(m).unwrap());
        }
    }

    #[test]
    fn shipped_samplers_enforce_their_shape() {
        assert!(CoinLead.sample(2, &bits("101")).is_err());
        assert!(CoinLead.sample(1, &bits("1")).is_err());
        assert_eq!(CoinLead.sample(2, &bits("1011")).unwrap().unwrap().to_string(), "01");
        assert_eq!(CoinLead.sample(2, &bits("0011")).unwrap(), None);
        assert_eq!(Banner.sample(3, &bits("110100111")).unwrap().unwrap().to_string(), "110");
        assert_eq!(Banner.sample(3, &bits("100100111")).unwrap(), None);
    }

    #[test]
    fn canonical_sampling_is_deterministic_for_shipped_ensembles() {
        let limits = Limits::default();
        let config = SamplerConfig::default();
        for n in [2usize, 3] {
            let mut seen = std::collections::BTreeSet::new();
            for seed in 0..10u64 {
                let mut fb = fallback();
                let out = canonical_sample(&CoinLead, n, &config, &mut fb, &mut rng(seed), &limits)
                    .unwrap();
                let v = out.value.expect("coin-lead induced property is dense");
                assert_eq!(out.chosen_length, Some(n * n), "first interval length succeeds");
                assert!(out.diagnostics.is_empty());
                assert!(CoinLead.range_contains(n, &v).unwrap());
                seen.insert(v.to_string());
            }
            assert_eq!(seen.len(), 1, "reruns disagreed at length {n}: {seen:?}");
        }
        let mut fb = fallback();
        let out = canonical_sample(&Banner, 3, &config, &mut fb, &mut rng(0), &limits).unwrap();
        let v = out.value.unwrap();
        assert!(Banner.range_contains(3, &v).unwrap());
        assert!(v.get(0) && v.get(1));
    }

    #[test]
    fn canonical_sample_matches_the_constructed_string() {
        // With the default gate budget the hitting set at length 4 is all
        // of {0,1}^4, so the constructed string is the least member of the
        // induced property and the sample follows mechanically from it.
        let limits = Limits::default();
        let config = SamplerConfig::default();
        let mut fb = fallback();
        let out = canonical_sample(&CoinLead, 2, &config, &mut fb, &mut rng(7), &limits).unwrap();
        // Least 4-bit string with first bit 1 is 1000; g(2, 1000) = 00.
        assert_eq!(out.value.unwrap().to_string(), "00");
        let mut fb = fallback();
        let out = canonical_sample(&Banner, 2, &config, &mut fb, &mut rng(7), &limits).unwrap();
        // Least 4-bit string starting 11 is 1100; the sample keeps the header.
        assert_eq!(out.value.unwrap().to_string(), "11");
    }

    #[test]
    fn hopeless_ensemble_reports_every_length() {
        struct Doomed;
        impl Ensemble for Doomed {
            fn name(&self) -> &str {
                "doomed"
            }
            fn randomness_exponent(&self) -> u32 {
                2
            }
            fn nonfailure_exponent(&self) -> u32 {
                1
            }
            fn sample(&self, _n: usize, _w: &BitString) -> Result<Option<BitString>> {
                Ok(None)
            }
            fn range_contains(&self, _n: usize, _x: &BitString) -> Result<bool> {
                Ok(false)
            }
        }
        let limits = Limits::default();
        let config = SamplerConfig::default();
        let mut fb = fallback();
        let out = canonical_sample(&Doomed, 2, &config, &mut fb, &mut rng(1), &limits).unwrap();
        assert_eq!(out.value, None);
        assert_eq!(out.chosen_length, None);
        // The interval for n=2 is [4,8]: five lengths, five diagnostics.
        assert_eq!(out.diagnostics.len(), 5);
        assert!(out.diagnostics.iter().all(|d| d.detail.contains("no value")));
    }

    #[test]
    fn ensemble_specs_resolve() {
        assert_eq!(ensemble_by_spec("coin-lead").unwrap().name(), "coin-lead");
        assert_eq!(ensemble_by_spec("banner").unwrap().name(), "banner");
        let e = ensemble_by_spec("exe:/bin/true@2/1").unwrap();
        assert_eq!(e.randomness_exponent(), 2);
        assert!(ensemble_by_spec("exe:/bin/true").is_err());
        assert!(ensemble_by_spec("mystery").is_err());
    }

    #[cfg(unix)]
    #[test]
    fn external_ensembles_speak_the_line_protocol() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lead.sh");
        std::fs::write(
            &path,
            "#!/bin/sh\nread -r w\ncase \"$w\" in\n  1*) printf '%s\\n' \"$w\" | cut -c2-$(( $2 + 1 )) ;;\n  *) echo '*' ;;\nesac\n",
        )
        .unwrap();
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        let e = ExternalEnsemble::new(path.to_str().unwrap(), 2, 1).unwrap();
        assert_eq!(e.sample(2, &bits("1011")).unwrap().unwrap().to_string(), "01");
        assert_eq!(e.sample(2, &bits("0011")).unwrap(), None);
        // The full sampling loop works over the plug-in as well.
        let limits = Limits::default();
        let config = SamplerConfig::default();
        let mut fb = fallback();
        let out = canonical_sample(&e, 2, &config, &mut fb, &mut rng(0), &limits).unwrap();
        assert_eq!(out.value.unwrap().to_string(), "00");
    }
}
