//! Configurations of a Boolean automata network: points of the hypercube
//! `{0,1}^n`, written as binary strings with the state of automaton 0 leftmost.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard upper bound on the network size accepted anywhere in the library.
pub const HARD_CEILING: usize = 20;

/// A configuration `x ∈ {0,1}^n`. Bit `i` of `bits` holds the state of
/// automaton `i`, so the string form `x_0 x_1 … x_{n-1}` reads the bits from
/// low index to high.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Config {
    n: u8,
    bits: u32,
}

impl Config {
    pub fn new(n: usize, bits: u32) -> Self {
        assert!((1..=HARD_CEILING).contains(&n), "size {n} out of range");
        debug_assert_eq!(bits >> n, 0, "stray bits above index {n}");
        Config { n: n as u8, bits }
    }

    /// The all-zero configuration of size `n`.
    pub fn zero(n: usize) -> Self {
        Config::new(n, 0)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Raw bit pattern; doubles as the node id in transition graphs.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// State of automaton `i`.
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> i) & 1 == 1
    }

    /// The sign-switch map `s: b ↦ b − ¬b`, sending `0 ↦ −1` and `1 ↦ +1`.
    pub fn state_sign(&self, i: usize) -> i8 {
        if self.bit(i) {
            1
        } else {
            -1
        }
    }

    /// Flip the set of automata given as a bit mask.
    pub fn flip_mask(&self, mask: u32) -> Self {
        debug_assert_eq!(mask >> self.n, 0);
        Config {
            n: self.n,
            bits: self.bits ^ mask,
        }
    }

    /// Flip one automaton.
    pub fn flip_one(&self, i: usize) -> Self {
        debug_assert!(i < self.len());
        self.flip_mask(1 << i)
    }

    /// Flip a set of automata `W`, the `x̄^W` operation. Errors on an index
    /// out of range.
    pub fn flip(&self, w: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &i in w {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.len(),
                });
            }
            mask |= 1 << i;
        }
        Ok(self.flip_mask(mask))
    }

    /// Indices where `self` and `other` differ, together with the Hamming
    /// distance.
    pub fn hamming(&self, other: &Config) -> Result<(Vec<usize>, usize)> {
        let mask = self.diff_mask(other)?;
        Ok((mask_to_indices(mask), mask.count_ones() as usize))
    }

    /// Difference set as a bit mask.
    pub fn diff_mask(&self, other: &Config) -> Result<u32> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self.bits ^ other.bits)
    }

    /// All `2^n` configurations of size `n`, in node-id order.
    pub fn all(n: usize) -> impl Iterator<Item = Config> {
        (0u32..1 << n).map(move |bits| Config::new(n, bits))
    }
}

/// Expand a bit mask into a sorted index list.
pub fn mask_to_indices(mut mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        out.push(i);
        mask &= mask - 1;
    }
    out
}

/// Pack an index list into a bit mask.
pub fn indices_to_mask(indices: &[usize]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | (1 << i))
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// String order: x_0 is the most significant position, so sorted reports read
// like sorted binary strings.
impl Ord for Config {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| {
            let a = self.bits.reverse_bits() >> (32 - self.n);
            let b = other.bits.reverse_bits() >> (32 - other.n);
            a.cmp(&b)
        })
    }
}

impl PartialOrd for Config {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > HARD_CEILING {
            return Err(Error::Parse {
                line: 0,
                column: 0,
                message: format!("configuration must have between 1 and {HARD_CEILING} bits"),
            });
        }
        let mut bits = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        column: i + 1,
                        message: format!("expected 0 or 1, found {other:?}"),
                    })
                }
            }
        }
        Ok(Config::new(s.len(), bits))
    }
}

impl Serialize for Config {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
