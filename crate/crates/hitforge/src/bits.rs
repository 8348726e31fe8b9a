use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Finite binary string. Position 0 is the leftmost character of the
/// written form, so `Ord` (derived from `Vec<bool>`) is lexicographic
/// order with `'0' < '1'`; on equal lengths that coincides with numeric
/// order of the most-significant-bit-first value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn zeros(len: usize) -> Self {
        BitString { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        BitString { bits: vec![true; len] }
    }

    /// The `width`-bit string whose most-significant-bit-first value is
    /// `value`. Bits above `width` are ignored.
    pub fn from_value(value: u64, width: usize) -> Self {
        let mut bits = Vec::with_capacity(width);
        for i in (0..width).rev() {
            bits.push(value >> i & 1 == 1);
        }
        BitString { bits }
    }

    /// Most-significant-bit-first integer value. Defined for lengths up to 64.
    pub fn to_value(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::limit(format!(
                "bit string of length {} does not fit in 64 bits",
                self.len()
            )));
        }
        Ok(self.bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Leftmost `n` bits. Errors when the string is shorter than `n`.
    pub fn left(&self, n: usize) -> Result<BitString> {
        if self.len() < n {
            return Err(Error::input(format!(
                "cannot take leftmost {n} bits of a string of length {}",
                self.len()
            )));
        }
        Ok(BitString { bits: self.bits[..n].to_vec() })
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitString {
        BitString { bits: self.bits[range].to_vec() }
    }
}

/// Leftmost `n` bits of `u`; the truncation used when a generator emits more
/// bits than a consumer reads.
pub fn left_n(u: &BitString, n: usize) -> Result<BitString> {
    u.left(n)
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<BitString> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(BitString { bits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_round_trip() {
        let b = BitString::from_value(131, 8);
        assert_eq!(b.to_string(), "10000011");
        assert_eq!(b.to_value().unwrap(), 131);
    }

    #[test]
    fn left_prefixes() {
        let u: BitString = "01101".parse().unwrap();
        assert_eq!(u.left(3).unwrap().to_string(), "011");
        assert_eq!(u.left(5).unwrap(), u);
        assert_eq!(u.left(0).unwrap().to_string(), "");
        assert!(u.left(6).is_err());
    }

    #[test]
    fn lexicographic_order_matches_numeric_on_equal_length() {
        let a: BitString = "0111".parse().unwrap();
        let b: BitString = "1000".parse().unwrap();
        assert!(a < b);
        let c: BitString = "10".parse().unwrap();
        // Prefix ordering: shorter prefix sorts first.
        assert!(c < b);
    }

    #[test]
    fn parse_rejects_non_bits() {
        assert!("012".parse::<BitString>().is_err());
    }
}
