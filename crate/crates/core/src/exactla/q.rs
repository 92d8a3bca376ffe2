//! The scalar field: rationals that stay on machine words until they cannot.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

type Small = Ratio<i64>;

/// An exact rational number.
///
/// Values whose numerator and denominator fit in `i64` are kept in the `Small`
/// variant; everything else is promoted to a big rational. Results are always
/// demoted back when possible, so every value has exactly one representation and
/// structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    Small(Small),
    Big(BigRational),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse {0:?} as a rational (expected \"p\" or \"p/q\")")]
pub struct ParseQError(pub String);

impl Q {
    pub fn int(n: i64) -> Q {
        Q::Small(Small::from_integer(n))
    }

    /// `num / den`; panics if `den == 0`.
    pub fn frac(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        if num == i64::MIN || den == i64::MIN {
            return Q::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)));
        }
        Q::Small(Small::new(num, den))
    }

    fn from_big(b: BigRational) -> Q {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Q::Small(Small::new_raw(n, d)),
            _ => Q::Big(b),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Q::Small(s) => BigRational::new_raw(BigInt::from(*s.numer()), BigInt::from(*s.denom())),
            Q::Big(b) => b.clone(),
        }
    }

    /// `|numerator| ≤ bound` and `denominator ≤ bound`.
    pub fn within(&self, bound: i64) -> bool {
        match self {
            Q::Small(s) => s.numer().abs() <= bound && *s.denom() <= bound,
            Q::Big(_) => false,
        }
    }

    /// The image in `𝔽_p`, `p = 2^61 - 1`; `None` if the denominator vanishes there.
    pub fn residue(&self) -> Option<u64> {
        use super::modp::{inv, reduce_i128, P};
        let (n, d) = match self {
            Q::Small(s) => (reduce_i128(*s.numer() as i128), reduce_i128(*s.denom() as i128)),
            Q::Big(b) => {
                let p = BigInt::from(P);
                let r = |x: &BigInt| ((x % &p + &p) % &p).to_u64().expect("residue below p");
                (r(b.numer()), r(b.denom()))
            }
        };
        (d != 0).then(|| ((n as u128 * inv(d) as u128) % P as u128) as u64)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(s) => s.numer() == &0,
            Q::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(s) if s.numer() == &1 && s.denom() == &1)
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(s) => s.numer() < &0,
            Q::Big(b) => b.is_negative(),
        }
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Q::Small(s) if *s.numer() != i64::MIN => Q::Small(s.recip()),
            _ => Q::from_big(self.to_big().recip()),
        }
    }

    /// `self * a + b` without an intermediate clone when both fit.
    pub fn mul_add(&self, a: &Q, b: &Q) -> Q {
        &(self * a) + b
    }

    pub fn sign_of(even: bool) -> Q {
        if even {
            Q::one()
        } else {
            -Q::one()
        }
    }

    /// `(-1)^k`.
    pub fn pow_neg_one(k: usize) -> Q {
        Q::sign_of(k % 2 == 0)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a> $tr<&'a Q> for &'a Q {
            type Output = Q;
            fn $method(self, rhs: &'a Q) -> Q {
                if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
                    if let Some(r) = a.$checked(b) {
                        if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                            return Q::Small(r);
                        }
                    }
                }
                Q::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $tr<Q> for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Q> for Q {
            type Output = Q;
            fn $method(self, rhs: &'a Q) -> Q {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add, +);
binop!(Sub, sub, checked_sub, -);
binop!(Mul, mul, checked_mul, *);

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, rhs: &'a Q) -> Q {
        assert!(!rhs.is_zero(), "division by zero");
        if let (Q::Small(a), Q::Small(b)) = (self, rhs) {
            if let Some(r) = a.checked_div(b) {
                if *r.numer() != i64::MIN && *r.denom() != i64::MIN {
                    return Q::Small(r);
                }
            }
        }
        Q::from_big(self.to_big() / rhs.to_big())
    }
}

impl Div<Q> for Q {
    type Output = Q;
    fn div(self, rhs: Q) -> Q {
        &self / &rhs
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(s) => Q::Small(-s),
            Q::Big(b) => Q::from_big(-b),
        }
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        -(self.clone())
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Q> for Q {
    fn mul_assign(&mut self, rhs: &Q) {
        *self = &*self * rhs;
    }
}

impl Zero for Q {
    fn zero() -> Q {
        Q::int(0)
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
}

impl One for Q {
    fn one() -> Q {
        Q::int(1)
    }
}

impl Default for Q {
    fn default() -> Q {
        Q::zero()
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::int(n)
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a), Q::Small(b)) => {
                let l = *a.numer() as i128 * *b.denom() as i128;
                let r = *b.numer() as i128 * *a.denom() as i128;
                l.cmp(&r)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(s) if *s.denom() == 1 => write!(f, "{}", s.numer()),
            Q::Small(s) => write!(f, "{}/{}", s.numer(), s.denom()),
            Q::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Q::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = ParseQError;
    fn from_str(s: &str) -> Result<Q, ParseQError> {
        let err = || ParseQError(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Q::int(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn promotes_and_demotes() {
        let big = Q::int(i64::MAX);
        let sum = &big + &big;
        assert!(matches!(sum, Q::Big(_)));
        let back = &sum - &big;
        assert_eq!(back, big);
        assert!(matches!(back, Q::Small(_)));
    }

    #[test]
    fn canonical_equality() {
        assert_eq!(Q::frac(2, 4), Q::frac(-1, -2));
        assert_eq!(&Q::frac(1, 3) + &Q::frac(2, 3), Q::one());
        assert_eq!(&Q::int(3) / &Q::int(2), Q::frac(3, 2));
    }

    #[test]
    fn text_roundtrip() {
        for s in ["0", "-7", "3/2", "-5/9", "123456789012345678901234567891/7"] {
            let q: Q = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        assert!("1/0".parse::<Q>().is_err());
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn ordering_matches_value() {
        assert!(Q::frac(1, 3) < Q::frac(1, 2));
        assert!(Q::frac(-1, 2) < Q::zero());
        let huge: Q = "100000000000000000000000".parse().unwrap();
        assert!(Q::int(5) < huge);
    }
}
