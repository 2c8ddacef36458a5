use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Maximum number of variables a [`Bitstring`] can hold.
pub const MAX_BITS: usize = 63;

/// Fixed-length bitstring `z_1 … z_N`.
///
/// Stored with `z_1` as the most significant bit so that integer order equals
/// lexicographic order of the printed string. The raw value doubles as the
/// computational-basis index in full Hilbert-space simulations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    bits: u64,
    len: u8,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bitstring too long");
        Bitstring {
            bits: 0,
            len: len as u8,
        }
    }

    pub fn ones(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bitstring too long");
        Bitstring {
            bits: (1u64 << len) - 1,
            len: len as u8,
        }
    }

    /// Builds a bitstring from its basis index (`z_1` most significant).
    pub fn from_index(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "bitstring too long");
        debug_assert!(bits >> len == 0);
        Bitstring { bits, len: len as u8 }
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let mut b = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Position of variable `i` inside the raw integer.
    #[inline]
    pub fn mask_of(len: usize, i: usize) -> u64 {
        1u64 << (len - 1 - i)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        self.bits & Self::mask_of(self.len(), i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len());
        let m = Self::mask_of(self.len(), i);
        if value {
            self.bits |= m;
        } else {
            self.bits &= !m;
        }
    }

    #[inline]
    pub fn with(mut self, i: usize, value: bool) -> Self {
        self.set(i, value);
        self
    }

    /// Flips every bit set in `mask` (raw positions).
    #[inline]
    pub fn flipped(self, mask: u64) -> Self {
        Bitstring {
            bits: self.bits ^ mask,
            len: self.len,
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn hamming(&self, other: &Bitstring) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_BITS {
            return Err(Error::Parse(format!("bitstring longer than {MAX_BITS}")));
        }
        let mut b = Bitstring::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(i, true),
                other => return Err(Error::Parse(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(b)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
