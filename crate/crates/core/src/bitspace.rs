//! Bit strings over `{0,1}^n` with Hamming geometry.
//!
//! Positions are numbered `1..=n`, position 1 leftmost in the textual form.
//! Position `i` is stored at bit `n - i` of a single `u64`, so numeric order
//! on the word coincides with lexicographic order over positions `1..=n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_lengths, Error, Result};

pub const MAX_LEN: usize = 64;

/// A fixed-length binary word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    // field order matters for the derived Ord
    len: u8,
    word: u64,
}

#[inline]
fn low_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl BitString {
    /// All-zeros string of length `len`.
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_word(len, 0)
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::from_word(len, low_mask(len.min(MAX_LEN)))
    }

    /// Builds a string from its packed word. Bit `n - i` holds position `i`.
    pub fn from_word(len: usize, word: u64) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::InvalidArgument(format!(
                "bit string length must be in 1..={MAX_LEN}, got {len}"
            )));
        }
        if word & !low_mask(len) != 0 {
            return Err(Error::InvalidArgument(format!(
                "word {word:#x} has bits beyond length {len}"
            )));
        }
        Ok(Self {
            len: len as u8,
            word,
        })
    }

    pub(crate) fn from_word_unchecked(len: usize, word: u64) -> Self {
        debug_assert!(len >= 1 && len <= MAX_LEN && word & !low_mask(len) == 0);
        Self {
            len: len as u8,
            word,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let len = bits.len();
        let word = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Self::from_word(len, word)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Always false: the minimum length is 1.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn word(&self) -> u64 {
        self.word
    }

    /// Bit at 1-based position `i`.
    ///
    /// Panics if `i` is not in `1..=n`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            (1..=self.len()).contains(&i),
            "position {i} out of range 1..={}",
            self.len
        );
        (self.word >> (self.len() - i)) & 1 == 1
    }

    /// Returns a copy with position `i` (1-based) set to `value`.
    pub fn with(&self, i: usize, value: bool) -> Self {
        assert!((1..=self.len()).contains(&i), "position {i} out of range");
        let bit = 1u64 << (self.len() - i);
        let word = if value { self.word | bit } else { self.word & !bit };
        Self { len: self.len, word }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len()).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.word.count_ones()
    }

    /// Componentwise exclusive-or.
    pub fn xor(&self, mask: &BitString) -> Result<Self> {
        check_lengths(self.len(), mask.len())?;
        Ok(Self {
            len: self.len,
            word: self.word ^ mask.word,
        })
    }

    pub fn complement(&self) -> Self {
        Self {
            len: self.len,
            word: !self.word & low_mask(self.len()),
        }
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming(&self, other: &BitString) -> Result<u32> {
        check_lengths(self.len(), other.len())?;
        Ok((self.word ^ other.word).count_ones())
    }

    /// Iterates over all `2^n` strings of length `n` in lexicographic order.
    pub fn all(len: usize) -> Result<impl Iterator<Item = BitString>> {
        let _ = Self::zeros(len)?;
        if len >= 64 {
            return Err(Error::GuardExceeded(format!(
                "cannot enumerate 2^{len} strings"
            )));
        }
        Ok((0..1u64 << len).map(move |w| BitString::from_word_unchecked(len, w)))
    }
}

/// Hamming distance between equal-length strings.
pub fn hamming(x: &BitString, y: &BitString) -> Result<u32> {
    x.hamming(y)
}

pub fn xor(x: &BitString, m: &BitString) -> Result<BitString> {
    x.xor(m)
}

/// The three distinguished strings of the canonical setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalStrings {
    /// `1010...10`: ones at odd positions.
    pub z: BitString,
    /// `0101...01`, the complement of `z`.
    pub z_prime: BitString,
    /// All ones.
    pub target: BitString,
}

pub fn canonical_strings(n: usize) -> Result<CanonicalStrings> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "canonical strings need an even positive length, got {n}"
        )));
    }
    let z = BitString::from_bits(&(1..=n).map(|i| i % 2 == 1).collect::<Vec<_>>())?;
    Ok(CanonicalStrings {
        z,
        z_prime: z.complement(),
        target: BitString::ones(n)?,
    })
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(k, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "invalid character {other:?} at position {} of bit string",
                    k + 1
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn hamming_examples() {
        let c4 = canonical_strings(4).unwrap();
        assert_eq!(hamming(&c4.z, &c4.z_prime).unwrap(), 4);
        let c6 = canonical_strings(6).unwrap();
        assert_eq!(hamming(&c6.z, &c6.target).unwrap(), 3);
        assert_eq!(hamming(&bs("1100"), &bs("1010")).unwrap(), 2);
    }

    #[test]
    fn hamming_length_mismatch() {
        assert_eq!(
            hamming(&bs("10"), &bs("101")),
            Err(Error::LengthMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn xor_examples() {
        for n in (2..=16).step_by(2) {
            let c = canonical_strings(n).unwrap();
            assert_eq!(xor(&c.z, &BitString::zeros(n).unwrap()).unwrap(), c.z);
            assert_eq!(xor(&c.z, &BitString::ones(n).unwrap()).unwrap(), c.z_prime);
        }
        assert_eq!(xor(&bs("1010"), &bs("0110")).unwrap(), bs("1100"));
        assert!(xor(&bs("1010"), &bs("01")).is_err());
    }

    #[test]
    fn canonical_examples() {
        let c = canonical_strings(2).unwrap();
        assert_eq!((c.z, c.z_prime, c.target), (bs("10"), bs("01"), bs("11")));
        let c = canonical_strings(4).unwrap();
        assert_eq!((c.z, c.z_prime, c.target), (bs("1010"), bs("0101"), bs("1111")));
        let c = canonical_strings(6).unwrap();
        assert_eq!(c.z_prime.hamming(&c.target).unwrap(), 3);
        assert!(canonical_strings(5).is_err());
        assert!(canonical_strings(0).is_err());
    }

    #[test]
    fn canonical_distances_up_to_32() {
        for n in (2..=32).step_by(2) {
            let c = canonical_strings(n).unwrap();
            assert_eq!(c.z.hamming(&c.z_prime).unwrap() as usize, n);
            assert_eq!(c.z.hamming(&c.target).unwrap() as usize, n / 2);
        }
    }

    #[test]
    fn text_and_positions() {
        let x = bs("1000");
        assert!(x.get(1) && !x.get(4));
        assert_eq!(x.to_string(), "1000");
        assert_eq!(x.with(4, true), bs("1001"));
        assert!("10a1".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
        let long = "1".repeat(64);
        assert_eq!(long.parse::<BitString>().unwrap().count_ones(), 64);
        assert!("1".repeat(65).parse::<BitString>().is_err());
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut all: Vec<_> = BitString::all(3).unwrap().map(|b| b.to_string()).collect();
        let sorted = {
            let mut s = all.clone();
            s.sort();
            s
        };
        assert_eq!(all, sorted);
        all.dedup();
        assert_eq!(all.len(), 8);
        assert!(bs("0111") < bs("1000"));
    }

    fn triple(n: usize) -> impl Strategy<Value = (BitString, BitString, BitString)> {
        let mask = low_mask(n);
        (any::<u64>(), any::<u64>(), any::<u64>()).prop_map(move |(a, b, c)| {
            (
                BitString::from_word_unchecked(n, a & mask),
                BitString::from_word_unchecked(n, b & mask),
                BitString::from_word_unchecked(n, c & mask),
            )
        })
    }

    proptest! {
        #[test]
        fn metric_axioms((x, y, w) in (1usize..=64).prop_flat_map(triple)) {
            let d = |a: &BitString, b: &BitString| a.hamming(b).unwrap();
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert_eq!(d(&x, &y) == 0, x == y);
            prop_assert!(d(&x, &w) <= d(&x, &y) + d(&y, &w));
        }

        #[test]
        fn xor_is_isometric_involution((x, y, m) in (1usize..=64).prop_flat_map(triple)) {
            let xm = x.xor(&m).unwrap();
            prop_assert_eq!(xm.xor(&m).unwrap(), x);
            prop_assert_eq!(xm.hamming(&y.xor(&m).unwrap()).unwrap(), x.hamming(&y).unwrap());
        }

        #[test]
        fn text_round_trip((x, _, _) in (1usize..=64).prop_flat_map(triple)) {
            prop_assert_eq!(x.to_string().parse::<BitString>().unwrap(), x);
        }
    }
}
