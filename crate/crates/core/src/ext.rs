//! Extended reals `ℝ ∪ {+∞}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    /// Maps `+inf` to `PosInf`. Panics on NaN or `-inf`, which are never legitimate values.
    pub fn from_f64(v: f64) -> ExtendedReal {
        assert!(!v.is_nan(), "NaN cannot be an extended real");
        assert!(v != f64::NEG_INFINITY, "-inf cannot be an extended real");
        if v == f64::INFINITY {
            ExtendedReal::PosInf
        } else {
            ExtendedReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInf => None,
        }
    }

    /// `f64` view with `+∞` as `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn sub_finite(self, v: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(a) => ExtendedReal::Finite(a - v),
            ExtendedReal::PosInf => ExtendedReal::PosInf,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInf,
        }
    }
}

impl Add<f64> for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: f64) -> ExtendedReal {
        self + ExtendedReal::Finite(rhs)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &ExtendedReal) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtendedReal::Finite(v)),
            Raw::Text(t) if t == "inf" => Ok(ExtendedReal::PosInf),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }
}

/// Serde adapter for `f64` fields that may hold `±inf`: infinities are written as the
/// strings `"inf"` / `"-inf"`. NaN is written as `"nan"` and should never occur.
pub mod serde_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(serde::de::Error::custom(format!("bad number {t:?}"))),
            },
        }
    }
}

/// Same as [`serde_f64`] for vectors.
pub mod serde_vec_f64 {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct W(#[serde(with = "super::serde_f64")] f64);
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&W(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "super::serde_f64")] f64);
        let raw: Vec<W> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(ExtendedReal::PosInf + 3.0, ExtendedReal::PosInf);
        assert_eq!(ExtendedReal::Finite(1.0) + ExtendedReal::Finite(2.0), ExtendedReal::Finite(3.0));
    }

    #[test]
    fn serializes_infinity_as_string() {
        let s = serde_json::to_string(&vec![ExtendedReal::Finite(1.5), ExtendedReal::PosInf]).unwrap();
        assert_eq!(s, "[1.5,\"inf\"]");
        let back: Vec<ExtendedReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![ExtendedReal::Finite(1.5), ExtendedReal::PosInf]);
    }

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(ExtendedReal::Finite(1e300) < ExtendedReal::PosInf);
    }
}
