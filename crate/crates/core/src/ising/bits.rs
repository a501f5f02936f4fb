use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An Ising spin, `Z = +1` or `Z = -1`.
///
/// The bit convention is `B = (1 - Z) / 2`, so `Plus` is bit 0 and `Minus` is
/// bit 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub fn from_bit(bit: u8) -> Spin {
        if bit == 0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Spin::Plus => 1.0,
            Spin::Minus => -1.0,
        }
    }

    pub fn from_value(z: i8) -> Result<Spin> {
        match z {
            1 => Ok(Spin::Plus),
            -1 => Ok(Spin::Minus),
            _ => Err(Error::InvalidParameter(format!("spin value must be +1 or -1, got {z}"))),
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value() as i8)
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let z = i8::deserialize(d)?;
        Spin::from_value(z).map_err(serde::de::Error::custom)
    }
}

/// A candidate solution: one bit per original variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        BitString { bits: vec![0; n] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("bit value {b} is not 0 or 1")));
        }
        Ok(BitString { bits })
    }

    pub fn from_spins(spins: &[Spin]) -> Self {
        BitString {
            bits: spins.iter().map(|s| s.bit()).collect(),
        }
    }

    /// Little-endian: bit `i` of `index` becomes position `i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        BitString {
            bits: (0..n).map(|i| ((index >> i) & 1) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn spin(&self, i: usize) -> Spin {
        Spin::from_bit(self.bits[i])
    }

    /// `Z_i = 1 - 2 B_i`.
    pub fn z(&self, i: usize) -> f64 {
        1.0 - 2.0 * self.bits[i] as f64
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        self.bits[i] = bit & 1;
    }

    pub fn set_spin(&mut self, i: usize, spin: Spin) {
        self.bits[i] = spin.bit();
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn spins(&self) -> Vec<Spin> {
        self.bits.iter().map(|&b| Spin::from_bit(b)).collect()
    }

    /// Flip every bit.
    pub fn complement(&self) -> BitString {
        BitString {
            bits: self.bits.iter().map(|b| 1 - b).collect(),
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidParameter(format!("invalid bit character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(BitString { bits })
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spin_bit_convention() {
        assert_eq!(Spin::from_bit(0).value(), 1.0);
        assert_eq!(Spin::from_bit(1).value(), -1.0);
        assert_eq!(Spin::Minus.flipped(), Spin::Plus);
        assert!(Spin::from_value(0).is_err());
    }

    #[test]
    fn index_is_little_endian() {
        let b = BitString::from_index(0b110, 4);
        assert_eq!(b.to_string(), "0110");
    }

    #[test]
    fn rejects_non_binary() {
        assert!(BitString::from_bits(vec![0, 2]).is_err());
        assert!("01x".parse::<BitString>().is_err());
    }

    proptest! {
        #[test]
        fn spin_bit_involution(bits in proptest::collection::vec(0u8..2, 0..40)) {
            let b = BitString::from_bits(bits.clone()).unwrap();
            let back = BitString::from_spins(&b.spins());
            prop_assert_eq!(&back, &b);
            let text = serde_json::to_string(&b).unwrap();
            let parsed: BitString = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(parsed, b);
        }
    }
}
