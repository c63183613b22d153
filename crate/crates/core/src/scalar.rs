//! Exact scalars: the ring/field traits and the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rationals.
pub type Q = BigRational;

/// Commutative ring with exact equality.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Exact field. Text form is used by the JSON and CLI layers.
pub trait Field: Ring + fmt::Display + Send + Sync + 'static {
    fn inv(&self) -> Option<Self>;
    fn from_q(q: &Q) -> Self;
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Result<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_q(&Q::from_integer(BigInt::from(n)))
    }

    fn div(&self, other: &Self) -> Result<Self> {
        other.inv().map(|i| self.mul(&i)).ok_or(Error::DivisionByZero)
    }

    /// Integer power; negative exponents need an invertible base.
    fn pow_i(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow_u(e as u64))
        } else {
            Ok(self.inv().ok_or(Error::DivisionByZero)?.pow_u(e.unsigned_abs()))
        }
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for Q {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_text(&self) -> String {
        q_to_string(self)
    }
    fn parse_text(s: &str) -> Result<Self> {
        parse_q(s)
    }
}

/// Integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The rational n/d.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Q::new(n, d))
    } else {
        Ok(Q::from_integer(BigInt::from_str(t).map_err(|_| bad())?))
    }
}

pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_is_integer(x: &Q) -> bool {
    x.is_integer()
}

pub fn q_sign(x: &Q) -> i32 {
    if Zero::is_zero(x) {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

/// Serde helpers storing rationals as "p/q" strings.
pub mod q_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde helpers for any [`Field`] via its text form.
pub mod field_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<F: Field, S: Serializer>(x: &F, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_text())
    }

    pub fn deserialize<'de, F: Field, D: Deserializer<'de>>(d: D) -> std::result::Result<F, D::Error> {
        let s = String::deserialize(d)?;
        F::parse_text(&s).map_err(serde::de::Error::custom)
    }
}
