//! Dense properties over bit strings and exact density measurement.
//!
//! A property is a total, deterministic membership procedure over bit
//! strings, optionally annotated with a claimed density floor used for
//! reporting.  The built-ins are the all-strings property, binary-encoded
//! primes, and almost-incompressible strings relative to a compression
//! scheme; arbitrary external deciders can be plugged in as executables.

use std::process::{Command, Stdio};

use crate::bits::BitString;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::Rat;

/// A total decision procedure over bit strings.
///
/// `contains` must be deterministic; `claimed_density(n)` is an optional
/// advertised floor for `|Q_n| / 2^n`, reported but never assumed.
pub trait Property {
    fn name(&self) -> &str;
    fn contains(&self, x: &BitString) -> Result<bool>;
    fn claimed_density(&self, _n: usize) -> Option<Rat> {
        None
    }
    /// Decide many candidates at once. The default loops over `contains`;
    /// external deciders override this with one subprocess per batch.
    fn contains_batch(&self, xs: &[BitString]) -> Result<Vec<bool>> {
        xs.iter().map(|x| self.contains(x)).collect()
    }
}

/// The property containing every string.
pub struct AllStrings;

impl Property for AllStrings {
    fn name(&self) -> &str {
        "all"
    }
    fn contains(&self, _x: &BitString) -> Result<bool> {
        Ok(true)
    }
    fn claimed_density(&self, _n: usize) -> Option<Rat> {
        Some(Rat::new(1, 1))
    }
}

/// Binary-encoded primes: the leading bit must be 1 (so every member of
/// `Q_n` encodes an n-bit integer) and the encoded value must be prime.
/// Values are read most significant bit first; lengths up to 64 bits are
/// supported.
pub struct Primes;

impl Property for Primes {
    fn name(&self) -> &str {
        "primes"
    }
    fn contains(&self, x: &BitString) -> Result<bool> {
        if x.is_empty() {
            return Err(Error::input("primes membership needs a nonempty string"));
        }
        if x.len() > 64 {
            return Err(Error::PropertyEval(format!(
                "primes membership supports up to 64 bits, got {}",
                x.len()
            )));
        }
        if !x.get(0) {
            return Ok(false);
        }
        Ok(is_prime_u64(x.to_value()?))
    }
    fn claimed_density(&self, n: usize) -> Option<Rat> {
        // A desk-scale floor loose enough for every supported length; the
        // prime-counting cross-checks in the tests keep it honest.
        if n >= 2 {
            Some(Rat::new(1, 2 * n as i128))
        } else {
            None
        }
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin, exact for every 64-bit integer with the
/// fixed witness set 2..37 (the first twelve primes).
pub fn is_prime_u64(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if v == p {
            return true;
        }
        if v % p == 0 {
            return false;
        }
    }
    let d = (v - 1) >> (v - 1).trailing_zeros();
    let s = (v - 1).trailing_zeros();
    'witness: for a in SMALL_PRIMES {
        let mut x = pow_mod(a, d, v);
        if x == 1 || x == v - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, v);
            if x == v - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A length-nonincreasing injective map on bit strings.
pub trait CompressionScheme {
    fn name(&self) -> &str;
    fn apply(&self, x: &BitString) -> Result<BitString>;
}

/// The identity scheme: compresses nothing, trivially injective.
pub struct IdentityScheme;

impl CompressionScheme for IdentityScheme {
    fn name(&self) -> &str {
        "identity"
    }
    fn apply(&self, x: &BitString) -> Result<BitString> {
        Ok(x.clone())
    }
}

/// Shortens all-zero strings of even length by two bits and leaves every
/// other string alone.
///
/// Injectivity on nonempty strings: the only strings whose image differs
/// from themselves are 0^{2k} (k ≥ 1), sent to 0^{2k-2}. Those images are
/// exactly the all-zero strings of even length below the domain maximum —
/// and no identity-branch string equals such an image, because an all-zero
/// even-length string is never on the identity branch. Distinct chain
/// inputs have distinct lengths, so their images differ too.
///
/// Consequently the almost-incompressible set misses only 0^n at even n,
/// for a density of exactly 1 − 2^{-n} there and 1 at odd n.
pub struct ZeroChainScheme;

impl CompressionScheme for ZeroChainScheme {
    fn name(&self) -> &str {
        "zero-chain"
    }
    fn apply(&self, x: &BitString) -> Result<BitString> {
        if !x.is_empty() && x.len() % 2 == 0 && x.count_ones() == 0 {
            Ok(BitString::zeros(x.len() - 2))
        } else {
            Ok(x.clone())
        }
    }
}

/// Strings the scheme cannot shorten by two or more bits:
/// membership holds iff `|f(x)| ≥ |x| − 1`.
pub struct IncompressibleStrings<S: CompressionScheme> {
    scheme: S,
    name: String,
}

impl<S: CompressionScheme> IncompressibleStrings<S> {
    pub fn new(scheme: S) -> Self {
        let name = format!("incompressible:{}", scheme.name());
        IncompressibleStrings { scheme, name }
    }
}

impl<S: CompressionScheme> Property for IncompressibleStrings<S> {
    fn name(&self) -> &str {
        &self.name
    }
    fn contains(&self, x: &BitString) -> Result<bool> {
        let image = self.scheme.apply(x)?;
        if image.len() > x.len() {
            return Err(Error::SchemeContract(format!(
                "scheme {} lengthened a {}-bit string to {} bits",
                self.scheme.name(),
                x.len(),
                image.len()
            )));
        }
        Ok(image.len() + 1 >= x.len())
    }
    fn claimed_density(&self, _n: usize) -> Option<Rat> {
        // Counting argument: strings of length < n − 1 are too few to be
        // images of more than half of {0,1}^n under an injective map.
        Some(Rat::new(1, 2))
    }
}

/// Membership decided by an external executable.
///
/// Per-candidate protocol: the candidate is written to standard input as a
/// line of 0/1 characters; exit status 0 means member, 1 means non-member,
/// anything else is an evaluation error. Batch protocol: one candidate per
/// input line, one 0/1 output line per candidate, overall exit status 0.
pub struct ExternalProperty {
    path: String,
    name: String,
}

impl ExternalProperty {
    pub fn new(path: impl Into<String>) -> Self {
        let path = path.into();
        let name = format!("exe:{path}");
        ExternalProperty { path, name }
    }
}

impl Property for ExternalProperty {
    fn name(&self) -> &str {
        &self.name
    }
    fn contains(&self, x: &BitString) -> Result<bool> {
        let status = feed_lines(&self.path, &[x.to_string()])?.1;
        match status {
            Some(0) => Ok(true),
            Some(1) => Ok(false),
            other => Err(Error::PropertyEval(format!(
                "property executable {} returned status {:?}",
                self.path, other
            ))),
        }
    }
    fn contains_batch(&self, xs: &[BitString]) -> Result<Vec<bool>> {
        if xs.is_empty() {
            return Ok(Vec::new());
        }
        let lines: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        let (stdout, status) = feed_lines(&self.path, &lines)?;
        if status != Some(0) {
            return Err(Error::PropertyEval(format!(
                "property executable {} failed in batch mode (status {:?})",
                self.path, status
            )));
        }
        let answers: Vec<&str> = stdout.lines().collect();
        if answers.len() != xs.len() {
            return Err(Error::PropertyEval(format!(
                "property executable {} answered {} of {} candidates",
                self.path,
                answers.len(),
                xs.len()
            )));
        }
        answers
            .iter()
            .map(|a| match a.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::PropertyEval(format!(
                    "property executable {} emitted {:?}, want 0 or 1",
                    self.path, other
                ))),
            })
            .collect()
    }
}

/// A compression scheme implemented by an external executable: candidates
/// go in one per line, images come out one per line, exit status 0.
pub struct ExternalScheme {
    path: String,
    name: String,
}

impl ExternalScheme {
    pub fn new(path: impl Into<String>) -> Self {
        let path = path.into();
        let name = format!("exe:{path}");
        ExternalScheme { path, name }
    }
}

impl CompressionScheme for ExternalScheme {
    fn name(&self) -> &str {
        &self.name
    }
    fn apply(&self, x: &BitString) -> Result<BitString> {
        let (stdout, status) = feed_lines(&self.path, &[x.to_string()])?;
        if status != Some(0) {
            return Err(Error::SchemeContract(format!(
                "scheme executable {} failed (status {:?})",
                self.path, status
            )));
        }
        let line = stdout
            .lines()
            .next()
            .ok_or_else(|| Error::SchemeContract(format!("scheme executable {} wrote no image", self.path)))?;
        line.trim()
            .parse()
            .map_err(|e: Error| Error::SchemeContract(format!("scheme executable {}: {e}", self.path)))
    }
}

/// Run an executable, writing the given lines to its standard input, and
/// return (stdout, exit code). Input is fed from a separate thread so that
/// large batches cannot deadlock on pipe buffers.
fn feed_lines(path: &str, lines: &[String]) -> Result<(String, Option<i32>)> {
    run_plugin(path, &[], lines)
}

/// Launch an external helper with the given arguments, write the lines to
/// its standard input from a separate thread (so neither side can block on
/// a full pipe), and return its standard output plus exit code.
pub(crate) fn run_plugin(
    path: &str,
    args: &[String],
    lines: &[String],
) -> Result<(String, Option<i32>)> {
    use std::io::Write;
    let mut child = Command::new(path)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::PropertyEval(format!("failed to launch {path}: {e}")))?;
    let mut stdin = child.stdin.take().expect("stdin was piped");
    let payload = lines.join("\n") + "\n";
    let feeder = std::thread::spawn(move || {
        let _ = stdin.write_all(payload.as_bytes());
    });
    let output = child
        .wait_with_output()
        .map_err(|e| Error::PropertyEval(format!("failed to run {path}: {e}")))?;
    feeder.join().ok();
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
    Ok((stdout, output.status.code()))
}

/// Exact density `|Q_n| / 2^n` by full enumeration, as a rational.
pub fn density(q: &dyn Property, n: usize, limits: &Limits) -> Result<Rat> {
    if n == 0 {
        return Err(Error::input("density needs length at least 1"));
    }
    if n > limits.max_density_len {
        return Err(Error::limit(format!(
            "exact density enumerates 2^{n} strings, above the 2^{} cap",
            limits.max_density_len
        )));
    }
    let total = 1u64 << n;
    let mut members = 0i128;
    let mut value = 0u64;
    const CHUNK: u64 = 4096;
    while value < total {
        let upper = (value + CHUNK).min(total);
        let batch: Vec<BitString> = (value..upper).map(|v| BitString::from_value(v, n)).collect();
        members += q.contains_batch(&batch)?.iter().filter(|&&b| b).count() as i128;
        value = upper;
    }
    Ok(Rat::new(members, 1i128 << n))
}

/// Look up a built-in scheme by name, or wrap a path as an external one.
/// Built-ins: `identity`, `zero-chain`.
pub fn scheme_by_spec(spec: &str) -> Box<dyn CompressionScheme> {
    match spec {
        "identity" => Box::new(IdentityScheme),
        "zero-chain" => Box::new(ZeroChainScheme),
        path => Box::new(ExternalScheme::new(path)),
    }
}

/// Look up a built-in property by name, or wrap a path as an external one.
/// Built-ins: `all`, `primes`, `incompressible:<scheme>`.
pub fn property_by_spec(spec: &str) -> Box<dyn Property> {
    match spec {
        "all" => Box::new(AllStrings),
        "primes" => Box::new(Primes),
        other => {
            if let Some(scheme) = other.strip_prefix("incompressible:") {
                match scheme {
                    "identity" => Box::new(IncompressibleStrings::new(IdentityScheme)),
                    "zero-chain" => Box::new(IncompressibleStrings::new(ZeroChainScheme)),
                    path => Box::new(IncompressibleStrings::new(ExternalScheme::new(path))),
                }
            } else {
                Box::new(ExternalProperty::new(other))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn sieve(limit: usize) -> Vec<bool> {
        let mut prime = vec![true; limit];
        prime[0] = false;
        if limit > 1 {
            prime[1] = false;
        }
        let mut p = 2;
        while p * p < limit {
            if prime[p] {
                let mut q = p * p;
                while q < limit {
                    prime[q] = false;
                    q += p;
                }
            }
            p += 1;
        }
        prime
    }

    #[test]
    fn prime_membership_examples() {
        let q = Primes;
        assert!(q.contains(&bits("111")).unwrap()); // 7
        assert!(!q.contains(&bits("011")).unwrap()); // leading bit 0
        assert!(!q.contains(&bits("1000110001")).unwrap()); // 561 = 3·11·17
        assert!(q.contains(&bits("10000011")).unwrap()); // 131
        assert!(!q.contains(&bits("0000")).unwrap());
    }

    #[test]
    fn miller_rabin_agrees_with_a_full_sieve_below_two_to_twenty() {
        let table = sieve(1 << 20);
        for (v, &expected) in table.iter().enumerate() {
            assert_eq!(is_prime_u64(v as u64), expected, "v={v}");
        }
    }

    #[test]
    fn miller_rabin_known_large_values() {
        assert!(is_prime_u64(2_147_483_647)); // 2^31 - 1
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime_u64(18_446_744_073_709_551_615)); // 2^64 - 1
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn prime_density_matches_sieve_counts() {
        let limits = Limits::default();
        let table = sieve(1 << 14);
        for n in 2..=13usize {
            let count = (1usize << (n - 1)..1usize << n).filter(|&v| table[v]).count();
            let d = density(&Primes, n, &limits).unwrap();
            assert_eq!(d, Rat::new(count as i128, 1i128 << n), "n={n}");
        }
    }

    #[test]
    fn zero_chain_scheme_is_injective_and_never_lengthens() {
        let scheme = ZeroChainScheme;
        // Exhaustive over all strings of length 1..=12: images are distinct
        // and never longer than their preimages.
        let mut seen = std::collections::HashMap::new();
        for n in 1..=12usize {
            for v in 0..(1u64 << n) {
                let x = BitString::from_value(v, n);
                let y = scheme.apply(&x).unwrap();
                assert!(y.len() <= x.len());
                if let Some(prev) = seen.insert(y.to_string(), x.to_string()) {
                    panic!("collision: {prev} and {x} share an image");
                }
            }
        }
    }

    #[test]
    fn incompressible_density_misses_only_even_zero_strings() {
        let limits = Limits::default();
        let q = IncompressibleStrings::new(ZeroChainScheme);
        for n in 1..=10usize {
            let d = density(&q, n, &limits).unwrap();
            let expected = if n % 2 == 0 {
                Rat::new((1i128 << n) - 1, 1i128 << n)
            } else {
                Rat::new(1, 1)
            };
            assert_eq!(d, expected, "n={n}");
            assert!(d >= q.claimed_density(n).unwrap());
        }
    }

    #[test]
    fn incompressible_boundary_cases() {
        let q = IncompressibleStrings::new(ZeroChainScheme);
        assert!(q.contains(&bits("1100")).unwrap()); // identity branch
        assert!(!q.contains(&bits("0000")).unwrap()); // shortened by two
        // 00 -> empty string loses two bits: not almost-incompressible.
        assert!(!q.contains(&bits("00")).unwrap());
        let identity = IncompressibleStrings::new(IdentityScheme);
        assert!(identity.contains(&bits("0000")).unwrap());
    }

    #[test]
    fn density_rejects_oversized_lengths() {
        let limits = Limits::default();
        assert!(matches!(
            density(&AllStrings, 25, &limits),
            Err(Error::ResourceLimit(_))
        ));
        assert_eq!(density(&AllStrings, 5, &limits).unwrap(), Rat::new(1, 1));
    }

    #[test]
    fn registry_resolves_builtins() {
        assert_eq!(property_by_spec("all").name(), "all");
        assert_eq!(property_by_spec("primes").name(), "primes");
        assert_eq!(
            property_by_spec("incompressible:zero-chain").name(),
            "incompressible:zero-chain"
        );
        assert_eq!(scheme_by_spec("identity").name(), "identity");
    }
}
