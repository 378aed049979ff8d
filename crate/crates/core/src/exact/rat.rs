//! Exact rationals over arbitrary-precision integers.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
///
/// Serializes as the string `"p/q"` (or `"p"` when the denominator is one).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "zero denominator");
        Rat(BigRational::new(numer.into(), denom))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Rat(self.0.recip())
    }

    /// The integer value if this rational is integral and fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Error returned when a string is not of the form `p` or `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRatError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| err())?;
                let q: BigInt = q.trim().parse().map_err(|_| err())?;
                if q.is_zero() {
                    return Err(err());
                }
                Ok(Rat::new(p, q))
            }
            None => {
                let p: BigInt = s.parse().map_err(|_| err())?;
                Ok(Rat::from_int(p))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($Op:ident, $op:ident, $OpAssign:ident, $op_assign:ident) => {
        impl $Op<Rat> for Rat {
            type Output = Rat;
            fn $op(self, rhs: Rat) -> Rat {
                Rat((self.0).$op(rhs.0))
            }
        }
        impl<'a> $Op<&'a Rat> for Rat {
            type Output = Rat;
            fn $op(self, rhs: &'a Rat) -> Rat {
                Rat((self.0).$op(&rhs.0))
            }
        }
        impl<'a> $Op<Rat> for &'a Rat {
            type Output = Rat;
            fn $op(self, rhs: Rat) -> Rat {
                Rat((&self.0).$op(rhs.0))
            }
        }
        impl<'a, 'b> $Op<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $op(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$op(&rhs.0))
            }
        }
        impl $OpAssign<Rat> for Rat {
            fn $op_assign(&mut self, rhs: Rat) {
                (self.0).$op_assign(rhs.0)
            }
        }
        impl<'a> $OpAssign<&'a Rat> for Rat {
            fn $op_assign(&mut self, rhs: &'a Rat) {
                (self.0).$op_assign(&rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);
forward_binop!(Div, div, DivAssign, div_assign);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

/// Shorthand for an integral rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_int(n)
}

/// Shorthand for `p/q`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(p, q)
}
