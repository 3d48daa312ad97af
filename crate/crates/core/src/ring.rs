//! Coefficient rings and finitely supported linear combinations over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficients are stored as exact rationals; the ring decides which
/// values are admissible and how they are normalised.
pub type Coeff = BigRational;

pub fn int(v: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientRing {
    Integers,
    IntegersMod(u64),
    Rationals,
}

impl CoefficientRing {
    pub fn integers_mod(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("modulus must be >= 2, got {m}")));
        }
        Ok(CoefficientRing::IntegersMod(m))
    }

    /// Brings a value into canonical form for this ring.
    ///
    /// Integers reject non-integral values; `Z/m` reduces integral values to
    /// `0..m` and rejects fractions.
    pub fn normalize(&self, value: Coeff) -> Result<Coeff> {
        match self {
            CoefficientRing::Rationals => Ok(value),
            CoefficientRing::Integers => {
                if value.is_integer() {
                    Ok(value)
                } else {
                    Err(Error::UnsupportedRing {
                        ring: self.to_string(),
                        what: format!("non-integral coefficient {value}"),
                    })
                }
            }
            CoefficientRing::IntegersMod(m) => {
                if !value.is_integer() {
                    return Err(Error::UnsupportedRing {
                        ring: self.to_string(),
                        what: format!("non-integral coefficient {value}"),
                    });
                }
                let reduced = value.to_integer().mod_floor(&BigInt::from(*m));
                Ok(BigRational::from_integer(reduced))
            }
        }
    }

    /// Whether values of `self` may be cast into `target`.
    pub fn casts_to(&self, target: CoefficientRing) -> bool {
        match (self, target) {
            (a, b) if *a == b => true,
            (CoefficientRing::Integers, _) => true,
            (CoefficientRing::IntegersMod(m), CoefficientRing::IntegersMod(k)) => m % k == 0,
            _ => false,
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::IntegersMod(m) => write!(f, "Z/{m}"),
            CoefficientRing::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for CoefficientRing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" | "z" | "ZZ" => Ok(CoefficientRing::Integers),
            "Q" | "q" | "QQ" => Ok(CoefficientRing::Rationals),
            other => {
                let modulus = other
                    .strip_prefix("Z/")
                    .or_else(|| other.strip_prefix("z/"))
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown ring `{other}`")))?;
                CoefficientRing::integers_mod(modulus)
            }
        }
    }
}

impl Serialize for CoefficientRing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoefficientRing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// serde helpers writing coefficients as strings such as `"-3"` or `"5/2"`.
pub mod coeff_serde {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Coeff, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&c.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Coeff, D::Error> {
        let s = String::deserialize(d)?;
        parse_coeff(&s).map_err(serde::de::Error::custom)
    }
}

pub fn parse_coeff(s: &str) -> Result<Coeff> {
    BigRational::from_str(s.trim()).map_err(|e| Error::InvalidArgument(format!("bad coefficient `{s}`: {e}")))
}

/// Prime divisors of a positive integer by trial division.
pub fn prime_factors(n: &BigInt) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut n = n.abs();
    let mut p = BigInt::from(2u32);
    while &p * &p <= n {
        while (&n % &p).is_zero() {
            out.insert(p.to_u64().expect("trial divisor fits in u64"));
            n /= &p;
        }
        p += 1u32;
    }
    if n > BigInt::one() {
        out.insert(n.to_u64().expect("prime factor fits in u64"));
    }
    out
}

/// A finitely supported `K`-indexed combination over a coefficient ring.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Combination<K: Ord> {
    pub ring: CoefficientRing,
    pub terms: BTreeMap<K, Coeff>,
}

impl<K: Ord + Clone> Combination<K> {
    pub fn zero(ring: CoefficientRing) -> Self {
        Combination { ring, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: K, value: Coeff) -> Result<()> {
        if value.is_zero() {
            return Ok(());
        }
        let current = self.terms.remove(&key).unwrap_or_else(Coeff::zero);
        let updated = self.ring.normalize(current + value)?;
        if !updated.is_zero() {
            self.terms.insert(key, updated);
        }
        Ok(())
    }

    pub fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Coeff) -> Result<Self> {
        let mut out = Self::zero(self.ring);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * factor)?;
        }
        Ok(out)
    }

    pub fn cast(&self, ring: CoefficientRing) -> Result<Self> {
        if !self.ring.casts_to(ring) {
            return Err(Error::UnsupportedRing {
                ring: self.ring.to_string(),
                what: format!("cast to {ring}"),
            });
        }
        let mut out = Self::zero(ring);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation_per_ring() {
        let z5 = CoefficientRing::IntegersMod(5);
        assert_eq!(z5.normalize(int(-2)).unwrap(), int(3));
        assert_eq!(z5.normalize(int(10)).unwrap(), int(0));
        assert!(z5.normalize(frac(1, 2)).is_err());
        assert!(CoefficientRing::Integers.normalize(frac(5, 2)).is_err());
        assert_eq!(CoefficientRing::Rationals.normalize(frac(10, 4)).unwrap(), frac(5, 2));
    }

    #[test]
    fn ring_parsing() {
        assert_eq!("Z".parse::<CoefficientRing>().unwrap(), CoefficientRing::Integers);
        assert_eq!("Z/7".parse::<CoefficientRing>().unwrap(), CoefficientRing::IntegersMod(7));
        assert_eq!("Q".parse::<CoefficientRing>().unwrap(), CoefficientRing::Rationals);
        assert!("Z/1".parse::<CoefficientRing>().is_err());
        assert!("R".parse::<CoefficientRing>().is_err());
    }

    #[test]
    fn factorisation() {
        let got: Vec<u64> = prime_factors(&BigInt::from(360)).into_iter().collect();
        assert_eq!(got, vec![2, 3, 5]);
        assert!(prime_factors(&BigInt::from(1)).is_empty());
        assert_eq!(prime_factors(&BigInt::from(97)).into_iter().collect::<Vec<_>>(), vec![97]);
    }
}
