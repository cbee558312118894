//! Exact coefficients: the rationals or a prime field.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// The ground field every coefficient lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// `𝔽_p`, rejecting composite or trivial moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Mod {
                value: v.rem_euclid(*p as i64) as u64,
                modulus: *p,
            },
        }
    }

    /// `num/den` reduced into this field; `None` when `den` vanishes in it.
    pub fn from_fraction(&self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.from_i64(den);
        let inv = d.inverse()?;
        Some(self.from_i64(num) * inv)
    }

    pub fn sign(&self, negative: bool) -> Scalar {
        if negative {
            self.from_i64(-1)
        } else {
            self.one()
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        matches!(
            (self, s),
            (Field::Rational, Scalar::Rational(_)) | (Field::Prime(_), Scalar::Mod { .. })
        ) && match (self, s) {
            (Field::Prime(p), Scalar::Mod { modulus, .. }) => p == modulus,
            _ => true,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Mixing elements of different fields is a logic
/// error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Mod { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Mod { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    /// Small integer value, if this scalar is one.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.numer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Mod { value, .. } => i64::try_from(*value).ok(),
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

fn mismatch() -> ! {
    panic!("scalars from different fields combined")
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Mod {
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            _ => mismatch(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => {
                if b.is_one() {
                    return Scalar::Rational(a.clone());
                }
                if a.is_one() {
                    return Scalar::Rational(b.clone());
                }
                Scalar::Rational(a * b)
            }
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, modulus: q })
                if p == q =>
            {
                Scalar::Mod {
                    value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            _ => mismatch(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Scalar {
    /// True when the printed form starts with a minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Mod { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic_wraps() {
        let f = Field::prime(7).unwrap();
        let a = f.from_i64(5);
        let b = f.from_i64(4);
        assert_eq!(&a + &b, f.from_i64(2));
        assert_eq!(&a * &b, f.from_i64(6));
        assert_eq!(a.inverse().unwrap(), f.from_i64(3));
        assert_eq!(f.from_i64(-1), f.from_i64(6));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(2).is_ok());
    }

    #[test]
    fn rationals_are_exact() {
        let q = Field::Rational;
        let third = q.from_fraction(1, 3).unwrap();
        let sum = &(&third + &third) + &third;
        assert!(sum.is_one());
        assert_eq!(third.to_string(), "1/3");
        assert!(q.from_fraction(1, 0).is_none());
    }

    #[test]
    fn fraction_in_prime_field() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.from_fraction(1, 2).unwrap(), f.from_i64(3));
        assert!(f.from_fraction(1, 5).is_none());
    }
}
