//! Bit strings and GF(2) helpers shared by every protocol layer.
//!
//! A [`BitString`] is an ordered sequence a = (a₁, …, a_n) of 0/1 values.
//! When a string indexes a computational-basis state |a⟩ = |a₁⟩⊗…⊗|a_n⟩,
//! the first position is the most significant bit of the basis index, which
//! keeps Kronecker-product order and index order aligned.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Ordered bit string. Displays and serializes as e.g. `"0101"`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString(Vec<u8>);

impl BitString {
    /// Build from 0/1 values. Panics on anything else (programmer error).
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        Self(bits)
    }

    /// The all-zero string of length n.
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Interpret the low `n` bits of `index` as a string, first position
    /// most significant: index = Σ aⱼ·2^(n−j).
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|j| ((index >> (n - 1 - j)) & 1) as u8).collect())
    }

    /// Basis index of |a₁…a_n⟩ with the first position most significant.
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, j: usize) -> u8 {
        self.0[j]
    }

    pub fn set(&mut self, j: usize, value: u8) {
        assert!(value <= 1);
        self.0[j] = value;
    }

    /// Flip bit j in place.
    pub fn flip(&mut self, j: usize) {
        self.0[j] ^= 1;
    }

    /// Copy with bit j flipped.
    pub fn with_flipped(&self, j: usize) -> Self {
        let mut out = self.clone();
        out.flip(j);
        out
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// XOR of all positions.
    pub fn parity(&self) -> u8 {
        self.0.iter().fold(0, |acc, &b| acc ^ b)
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Entrywise XOR with another string of equal length.
    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "XOR of unequal lengths");
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// GF(2) inner product ⟨self, other⟩ = ⊕ⱼ selfⱼ·otherⱼ.
    pub fn dot(&self, other: &Self) -> u8 {
        assert_eq!(self.len(), other.len(), "dot of unequal lengths");
        self.0
            .iter()
            .zip(&other.0)
            .fold(0, |acc, (a, b)| acc ^ (a & b))
    }

    /// Concatenate two strings.
    pub fn concat(&self, other: &Self) -> Self {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        Self(bits)
    }

    /// Positions holding a 1.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.0[j] == 1).collect()
    }

    /// All 2ⁿ strings of length n in index order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        (0..1usize << n).map(move |i| BitString::from_index(i, n))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    // Debug matches Display ("0101"), which keeps transcripts readable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl FromStr for BitString {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(format!("invalid bit character {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip_is_msb_first() {
        let b = BitString::from_index(0b101, 3);
        assert_eq!(b.to_string(), "101");
        assert_eq!(b.to_index(), 5);
        assert_eq!(b.bit(0), 1); // first position is the most significant
    }

    #[test]
    fn parity_weight_and_xor() {
        let a: BitString = "1011".parse().unwrap();
        let b: BitString = "0011".parse().unwrap();
        assert_eq!(a.parity(), 1);
        assert_eq!(a.weight(), 3);
        assert_eq!(a.xor(&b).to_string(), "1000");
        assert_eq!(a.dot(&b), 0); // 0⊕0⊕1⊕1
    }

    #[test]
    fn serde_round_trip_as_string() {
        let a: BitString = "0110".parse().unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"0110\"");
        let back: BitString = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn rejects_non_bit_characters() {
        assert!("012".parse::<BitString>().is_err());
    }
}
