//! Extended reals `R ∪ {+∞}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::de::{self, Deserializer, Visitor};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A real number or `+∞`. `−∞` and NaN are unrepresentable.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Panics on NaN or `−∞`; use [`ExtReal::try_new`] for untrusted input.
    #[inline]
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan() && v != f64::NEG_INFINITY, "ExtReal cannot hold {v}");
        ExtReal(v)
    }

    pub fn try_new(v: f64) -> Result<Self> {
        if v.is_nan() || v == f64::NEG_INFINITY {
            Err(Error::InvalidParameter(format!("{v} is not an extended real")))
        } else {
            Ok(ExtReal(v))
        }
    }

    #[inline]
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "expected a finite value, got {v}");
        ExtReal(v)
    }

    /// `0` when `cond` holds, `+∞` otherwise.
    #[inline]
    pub fn indicator(cond: bool) -> Self {
        if cond {
            ExtReal::ZERO
        } else {
            ExtReal::INFINITY
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        !self.0.is_finite()
    }

    /// Raw value, `f64::INFINITY` for `+∞`.
    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn finite_value(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Multiplication by a real scalar. `0 · (+∞)` is rejected, as is a
    /// negative multiple of `+∞`.
    pub fn scale(self, s: f64) -> Result<Self> {
        if self.is_infinite() {
            if s == 0.0 {
                return Err(Error::ZeroTimesInfinity);
            }
            if s < 0.0 {
                return Err(Error::InvalidParameter("negative multiple of +inf".into()));
            }
            return Ok(self);
        }
        ExtReal::try_new(s * self.0)
    }

    pub fn min(self, other: Self) -> Self {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl AddAssign for ExtReal {
    fn add_assign(&mut self, rhs: ExtReal) {
        self.0 += rhs.0;
    }
}

/// Adding a finite real; the real must be finite.
impl Add<f64> for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn add(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs.is_finite());
        ExtReal(self.0 + rhs)
    }
}

/// Subtracting a finite real, e.g. a duality pairing.
impl Sub<f64> for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn sub(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs.is_finite());
        ExtReal(self.0 - rhs)
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> Self {
        iter.fold(ExtReal::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "+inf")
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

// JSON: finite values as numbers, `+∞` as the literal string "inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> serde::Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                ExtReal::try_new(v).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                match v {
                    "inf" => Ok(ExtReal::INFINITY),
                    _ => Err(E::custom(format!("unexpected string {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert!((ExtReal::INFINITY + ExtReal::finite(-3.0)).is_infinite());
        assert!((ExtReal::INFINITY - 1e300).is_infinite());
        assert_eq!(ExtReal::finite(1.5) + ExtReal::finite(2.0), 3.5);
    }

    #[test]
    fn zero_times_infinity_is_rejected() {
        assert_eq!(ExtReal::INFINITY.scale(0.0), Err(Error::ZeroTimesInfinity));
        assert!(ExtReal::INFINITY.scale(2.0).unwrap().is_infinite());
        assert_eq!(ExtReal::finite(3.0).scale(0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_infinity_is_unrepresentable() {
        assert!(ExtReal::try_new(f64::NEG_INFINITY).is_err());
        assert!(ExtReal::try_new(f64::NAN).is_err());
    }

    #[test]
    fn json_uses_inf_literal() {
        let v = vec![ExtReal::finite(1.0), ExtReal::INFINITY];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.0,"inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ExtReal>(r#""-inf""#).is_err());
    }

    #[test]
    fn ordering_places_infinity_last() {
        let mut v = vec![ExtReal::INFINITY, ExtReal::finite(2.0), ExtReal::finite(-1.0)];
        v.sort();
        assert_eq!(v[0], -1.0);
        assert!(v[2].is_infinite());
    }
}
