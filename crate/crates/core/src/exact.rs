//! Exact rational values with a stable JSON shape.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// A rational number, serialized as `{"num": .., "den": ..}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn int(v: i64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl From<i64> for Exact {
    fn from(v: i64) -> Self {
        Exact::int(v)
    }
}

impl From<u64> for Exact {
    fn from(v: u64) -> Self {
        Exact(BigRational::from_integer(BigInt::from(v)))
    }
}

impl std::ops::Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact(self.0 - rhs.0)
    }
}

impl std::ops::Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        Exact(self.0 * rhs.0)
    }
}

impl std::ops::Div for Exact {
    type Output = Exact;
    fn div(self, rhs: Exact) -> Exact {
        Exact(self.0 / rhs.0)
    }
}

impl std::iter::Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::int(0), |a, b| a + b)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

fn put_bigint<S: SerializeStruct>(st: &mut S, key: &'static str, v: &BigInt) -> Result<(), S::Error> {
    match v.to_i64() {
        Some(x) => st.serialize_field(key, &x),
        None => st.serialize_field(key, &v.to_string()),
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Exact", 2)?;
        put_bigint(&mut st, "num", self.numer())?;
        put_bigint(&mut st, "den", self.denom())?;
        st.end()
    }
}
