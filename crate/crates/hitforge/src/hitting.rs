//! Ordered multisets of fixed-length bit strings with a provenance tag,
//! plus their on-disk format.
//!
//! File format: a header line `n=<n>;count=<c>;provenance=<tag>` followed
//! by one binary string per line. The element order in the file is the
//! multiset order; consumers that need canonical order sort on use.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Where a hitting set came from: the truncated-truth-table generator, the
/// seed-enumeration generator, or an external file / ad-hoc construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    Easy,
    Nw,
    File,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Provenance::Easy => "easy",
            Provenance::Nw => "nw",
            Provenance::File => "file",
        };
        f.write_str(tag)
    }
}

impl FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "easy" => Ok(Provenance::Easy),
            "nw" => Ok(Provenance::Nw),
            "file" => Ok(Provenance::File),
            other => Err(Error::parse(format!("unknown provenance tag {other:?}"))),
        }
    }
}

/// An ordered multiset of n-bit strings. Always nonempty; every element
/// has length exactly n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HittingSet {
    n: usize,
    elements: Vec<BitString>,
    provenance: Provenance,
}

impl HittingSet {
    pub fn new(n: usize, elements: Vec<BitString>, provenance: Provenance) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("hitting-set element length must be at least 1"));
        }
        if elements.is_empty() {
            return Err(Error::input("a hitting set needs at least one element"));
        }
        if let Some(bad) = elements.iter().find(|e| e.len() != n) {
            return Err(Error::input(format!(
                "hitting-set element {bad} has length {}, want {n}",
                bad.len()
            )));
        }
        Ok(HittingSet { n, elements, provenance })
    }

    /// Every string of the given length, in ascending order.
    pub fn full_cube(n: usize) -> Result<Self> {
        if n == 0 || n > 24 {
            return Err(Error::input(format!(
                "full cube supported for lengths 1..=24, got {n}"
            )));
        }
        let elements = (0..1u64 << n).map(|v| BitString::from_value(v, n)).collect();
        HittingSet::new(n, elements, Provenance::File)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BitString] {
        &self.elements
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitString> {
        self.elements.iter()
    }

    /// The distinct elements in ascending order.
    pub fn sorted_distinct(&self) -> Vec<BitString> {
        let mut out = self.elements.clone();
        out.sort();
        out.dedup();
        out
    }

    pub fn write_to(&self, w: &mut dyn Write) -> Result<()> {
        writeln!(w, "n={};count={};provenance={}", self.n, self.elements.len(), self.provenance)?;
        for e in &self.elements {
            writeln!(w, "{e}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write_to(&mut file)
    }

    pub fn read_from(r: &mut dyn Read) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("empty hitting-set input"))??;
        let (mut n, mut count, mut provenance) = (None, None, None);
        for piece in header.split(';') {
            let (key, value) = piece
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("malformed header field {piece:?}")))?;
            match key.trim() {
                "n" => n = Some(parse_usize(value)?),
                "count" => count = Some(parse_usize(value)?),
                "provenance" => provenance = Some(value.trim().parse()?),
                other => return Err(Error::parse(format!("unknown header key {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse("header is missing n"))?;
        let count = count.ok_or_else(|| Error::parse("header is missing count"))?;
        let provenance = provenance.ok_or_else(|| Error::parse("header is missing provenance"))?;
        let mut elements = Vec::with_capacity(count);
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            elements.push(line.parse()?);
        }
        if elements.len() != count {
            return Err(Error::parse(format!(
                "header claims {count} elements, file has {}",
                elements.len()
            )));
        }
        HittingSet::new(n, elements, provenance)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut file = std::fs::File::open(path)?;
        Self::read_from(&mut file)
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(format!("expected a number, got {s:?}")))
}
