//! Serde adapters that keep arbitrary-precision integers as plain JSON
//! numbers.
//!
//! `serde_json` is compiled with its `arbitrary_precision` feature, so
//! numeric literals of any magnitude survive a round trip unchanged. The
//! modules here are meant for `#[serde(with = "...")]` on [`Int`] fields and
//! on vectors/matrices of them. Non-integral numbers are rejected.

use crate::arith::Int;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

fn number_from_int<E: serde::ser::Error>(v: &Int) -> Result<serde_json::Number, E> {
    serde_json::Number::from_str(&v.to_string())
        .map_err(|e| E::custom(format!("unrepresentable integer: {e}")))
}

fn int_from_number<E: serde::de::Error>(n: &serde_json::Number) -> Result<Int, E> {
    let text = n.to_string();
    Int::from_str(&text).map_err(|_| E::custom(format!("expected an integer, got {text}")))
}

/// `#[serde(with = "crate::io::int_scalar")]` for a single [`Int`].
pub mod int_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Int, ser: S) -> Result<S::Ok, S::Error> {
        number_from_int::<S::Error>(v)?.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Int, D::Error> {
        let n = serde_json::Number::deserialize(de)?;
        int_from_number::<D::Error>(&n)
    }
}

/// `#[serde(with = "crate::io::int_opt")]` for `Option<Int>`.
pub mod int_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Int>, ser: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => ser.serialize_some(&super::JsonInt(v.clone())),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Int>, D::Error> {
        let opt = Option::<serde_json::Number>::deserialize(de)?;
        opt.map(|n| int_from_number::<D::Error>(&n)).transpose()
    }
}

/// `#[serde(with = "crate::io::int_vec")]` for `Vec<Int>`.
pub mod int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Int], ser: S) -> Result<S::Ok, S::Error> {
        let nums: Result<Vec<_>, S::Error> = v.iter().map(number_from_int::<S::Error>).collect();
        nums?.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Int>, D::Error> {
        let nums = Vec::<serde_json::Number>::deserialize(de)?;
        nums.iter().map(int_from_number::<D::Error>).collect()
    }
}

/// `#[serde(with = "crate::io::int_mat")]` for `Vec<Vec<Int>>`.
pub mod int_mat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Int>], ser: S) -> Result<S::Ok, S::Error> {
        let rows: Result<Vec<Vec<_>>, S::Error> = v
            .iter()
            .map(|row| row.iter().map(number_from_int::<S::Error>).collect())
            .collect();
        rows?.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Vec<Int>>, D::Error> {
        let rows = Vec::<Vec<serde_json::Number>>::deserialize(de)?;
        rows.iter()
            .map(|row| row.iter().map(int_from_number::<D::Error>).collect())
            .collect()
    }
}

/// `#[serde(with = "crate::io::int_vec_opt")]` for `Option<Vec<Int>>`.
pub mod int_vec_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Int>>, ser: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => {
                let nums: Vec<JsonInt> = v.iter().cloned().map(JsonInt).collect();
                ser.serialize_some(&nums)
            }
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Vec<Int>>, D::Error> {
        let opt = Option::<Vec<serde_json::Number>>::deserialize(de)?;
        opt.map(|nums| nums.iter().map(int_from_number::<D::Error>).collect())
            .transpose()
    }
}

/// `#[serde(with = "crate::io::rat_scalar")]` for a single [`Rat`],
/// written as the exact string `"num/den"` (denominator always present).
pub mod rat_scalar {
    use super::*;
    use crate::arith::Rat;

    pub fn serialize<S: Serializer>(v: &Rat, ser: S) -> Result<S::Ok, S::Error> {
        format!("{}/{}", v.numer(), v.denom()).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(de)?;
        let (num, den) = text
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom(format!("expected num/den, got {text}")))?;
        let num = Int::from_str(num)
            .map_err(|_| serde::de::Error::custom(format!("bad numerator in {text}")))?;
        let den = Int::from_str(den)
            .map_err(|_| serde::de::Error::custom(format!("bad denominator in {text}")))?;
        if den == Int::from(0) {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rat::new(num, den))
    }
}

/// A standalone serializable big integer, for composing nested `with`
/// adapters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub Int);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        number_from_int::<S::Error>(&self.0)?.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(de)?;
        int_from_number::<D::Error>(&n).map(JsonInt)
    }
}
