//! Dual-mode scalar arithmetic.
//!
//! A [`Scalar`] is either an exact rational or an `f64`. Arithmetic between two
//! exact values stays exact; as soon as a float participates the result is a
//! float. This lets the same code path produce exact rationals for rational
//! inputs (shuffle splits, ordinal endpoints, mixing weights) and ordinary
//! floating point results otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as a number (expected decimal, integer or \"p/q\")")]
pub struct ParseScalarError(pub String);

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `num / den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn half() -> Self {
        Scalar::ratio(1, 2)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// The exact rational value. Floats convert losslessly (every finite
    /// `f64` is a dyadic rational); non-finite floats yield `None`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Float(x) => BigRational::from_float(*x),
        }
    }

    /// Same value, float mode.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(x) => x.is_finite(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    pub fn min(&self, other: &Scalar) -> Scalar {
        if other < self {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn max(&self, other: &Scalar) -> Scalar {
        if other > self {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn clamp_unit(&self) -> Scalar {
        self.max(&Scalar::zero()).min(&Scalar::one())
    }

    /// Square root; exact when the argument is the square of a rational.
    /// Negative arguments give `NaN` in float mode.
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(r) if !r.is_negative() => {
                let n = r.numer().sqrt();
                let d = r.denom().sqrt();
                if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                    Scalar::Exact(BigRational::new(n, d))
                } else {
                    Scalar::Float(self.to_f64().sqrt())
                }
            }
            _ => Scalar::Float(self.to_f64().sqrt()),
        }
    }

    pub fn parse(text: &str) -> Result<Scalar, ParseScalarError> {
        text.parse()
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// `"p/q"` and plain integers parse exactly; decimals parse as floats.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        let err = || ParseScalarError(text.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Scalar::Exact(BigRational::new(p, q)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::Exact(BigRational::from_integer(n)));
        }
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Scalar::Float(x)),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $exact:expr, $float:expr) => {
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact($exact(a, b)),
                    _ => Scalar::Float($float(self.to_f64(), rhs.to_f64())),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, |a: &BigRational, b: &BigRational| a + b, |a: f64, b: f64| a + b);
scalar_binop!(Sub, sub, |a: &BigRational, b: &BigRational| a - b, |a: f64, b: f64| a - b);
scalar_binop!(Mul, mul, |a: &BigRational, b: &BigRational| a * b, |a: f64, b: f64| a * b);
scalar_binop!(Div, div, |a: &BigRational, b: &BigRational| a / b, |a: f64, b: f64| a / b);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::int(0)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::int(1)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a JSON number or a rational string \"p/q\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
        Ok(Scalar::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
        Ok(Scalar::Exact(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
        if v.is_finite() {
            Ok(Scalar::Float(v))
        } else {
            Err(E::custom("non-finite number"))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact() {
        let x = Scalar::ratio(1, 3) + Scalar::ratio(1, 6);
        assert_eq!(x, Scalar::half());
        assert!(x.is_exact());
        assert_eq!(x.to_string(), "1/2");
    }

    #[test]
    fn float_contaminates() {
        let x = Scalar::ratio(1, 4) + Scalar::float(0.5);
        assert!(!x.is_exact());
        assert_eq!(x.to_f64(), 0.75);
    }

    #[test]
    fn parse_modes() {
        assert_eq!("1/4".parse::<Scalar>().unwrap(), Scalar::ratio(1, 4));
        assert!("-3".parse::<Scalar>().unwrap().is_exact());
        let d: Scalar = "0.25".parse().unwrap();
        assert!(!d.is_exact());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn sqrt_of_rational_square_is_exact() {
        assert_eq!(Scalar::ratio(9, 16).sqrt(), Scalar::ratio(3, 4));
        assert!(Scalar::ratio(9, 16).sqrt().is_exact());
        assert!(!Scalar::int(2).sqrt().is_exact());
    }

    #[test]
    fn json_round_trip() {
        let v = vec![Scalar::ratio(-1, 2), Scalar::int(3), Scalar::float(0.125)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-1/2","3",0.125]"#);
        let back: Vec<Scalar> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(back[0].is_exact() && !back[2].is_exact());
    }
}
