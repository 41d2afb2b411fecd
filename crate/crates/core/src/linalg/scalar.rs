//! Exact field elements over the rationals or a prime field.
//!
//! Rationals use a machine-word fast path (`Ratio<i64>` with checked
//! arithmetic) and promote to arbitrary precision on overflow. Results that
//! fit back into a machine word are demoted again, so structural equality is
//! value equality.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ground field: either `Q` or `F_p` for a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// Builds `F_p`, rejecting composite or out-of-range moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if !(2..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::Field(format!("{p} is not a supported prime")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar(Repr::Small(Ratio::from_integer(n))),
            FieldSpec::Prime(p) => Scalar(Repr::Mod {
                v: n.rem_euclid(p as i64) as u64,
                p,
            }),
        }
    }

    /// `num / den` in this field; `None` if `den` vanishes in the field.
    pub fn fraction(self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.int(den);
        if d.is_zero() {
            return None;
        }
        Some(self.int(num) * d.inv())
    }

    /// Parses an integer or `a/b` literal into this field.
    pub fn parse_scalar(self, text: &str) -> Option<Scalar> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num.parse().ok()?;
        let den: BigInt = den.parse().ok()?;
        match self {
            FieldSpec::Rationals => {
                if den.is_zero() {
                    return None;
                }
                Some(Scalar::from_big(BigRational::new(num, den)))
            }
            FieldSpec::Prime(p) => {
                let pb = BigInt::from(p);
                let reduce = |x: &BigInt| {
                    let r = ((x % &pb) + &pb) % &pb;
                    r.to_u64().expect("residue fits in u64")
                };
                let d = Scalar(Repr::Mod { v: reduce(&den), p });
                if d.is_zero() {
                    return None;
                }
                Some(Scalar(Repr::Mod { v: reduce(&num), p }) * d.inv())
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F {p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
    Mod { v: u64, p: u64 },
}

/// An exact element of the ground field.
///
/// Mixing elements of different fields is a programming error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => {
                Scalar(Repr::Small(Ratio::new_raw(n, d)))
            }
            _ => Scalar(Repr::Big(Box::new(r))),
        }
    }

    fn to_big(r: &Ratio<i64>) -> BigRational {
        BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_zero(),
            Repr::Big(r) => r.is_zero(),
            Repr::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_one(),
            Repr::Big(r) => r.is_one(),
            Repr::Mod { v, .. } => *v == 1,
        }
    }

    /// The field this element lives in.
    pub fn field(&self) -> FieldSpec {
        match &self.0 {
            Repr::Mod { p, .. } => FieldSpec::Prime(*p),
            _ => FieldSpec::Rationals,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match &self.0 {
            Repr::Small(r) => {
                if *r.numer() == i64::MIN {
                    Scalar::from_big(Self::to_big(r).recip())
                } else {
                    Scalar(Repr::Small(r.recip()))
                }
            }
            Repr::Big(r) => Scalar::from_big(r.recip()),
            Repr::Mod { v, p } => Scalar(Repr::Mod {
                v: pow_mod(*v, p - 2, *p),
                p: *p,
            }),
        }
    }

    /// Integer value when this is an integer that fits in `i64`.
    pub fn as_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(r) if r.is_integer() => Some(*r.numer()),
            Repr::Mod { v, .. } => Some(*v as i64),
            _ => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(r) => r.is_negative(),
            Repr::Mod { .. } => false,
        }
    }

    /// `self += a * b`, the inner step of every elimination.
    pub fn add_mul(&mut self, a: &Scalar, b: &Scalar) {
        let prod = a * b;
        *self += &prod;
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn mismatch() -> ! {
    panic!("arithmetic between scalars of different fields")
}

macro_rules! rational_op {
    ($a:expr, $b:expr, $checked:ident, $op:tt) => {
        match (&$a.0, &$b.0) {
            (Repr::Small(x), Repr::Small(y)) => match x.$checked(y) {
                Some(r) => Scalar(Repr::Small(r)),
                None => Scalar::from_big(Scalar::to_big(x) $op Scalar::to_big(y)),
            },
            (Repr::Small(x), Repr::Big(y)) => Scalar::from_big(Scalar::to_big(x) $op &**y),
            (Repr::Big(x), Repr::Small(y)) => Scalar::from_big(&**x $op Scalar::to_big(y)),
            (Repr::Big(x), Repr::Big(y)) => Scalar::from_big(&**x $op &**y),
            _ => mismatch(),
        }
    };
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        if let (Repr::Mod { v: a, p }, Repr::Mod { v: b, p: q }) = (&self.0, &rhs.0) {
            if p != q {
                mismatch();
            }
            let s = a + b;
            return Scalar(Repr::Mod {
                v: if s >= *p { s - p } else { s },
                p: *p,
            });
        }
        rational_op!(self, rhs, checked_add, +)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        if let (Repr::Mod { v: a, p }, Repr::Mod { v: b, p: q }) = (&self.0, &rhs.0) {
            if p != q {
                mismatch();
            }
            return Scalar(Repr::Mod {
                v: if a >= b { a - b } else { a + p - b },
                p: *p,
            });
        }
        rational_op!(self, rhs, checked_sub, -)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        if let (Repr::Mod { v: a, p }, Repr::Mod { v: b, p: q }) = (&self.0, &rhs.0) {
            if p != q {
                mismatch();
            }
            return Scalar(Repr::Mod {
                v: (*a as u128 * *b as u128 % *p as u128) as u64,
                p: *p,
            });
        }
        rational_op!(self, rhs, checked_mul, *)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small(r) => match r.numer().checked_neg() {
                Some(n) => Scalar(Repr::Small(Ratio::new_raw(n, *r.denom()))),
                None => Scalar::from_big(-Scalar::to_big(r)),
            },
            Repr::Big(r) => Scalar::from_big(-(**r).clone()),
            Repr::Mod { v, p } => Scalar(Repr::Mod {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => write!(f, "{r}"),
            Repr::Big(r) => write!(f, "{r}"),
            Repr::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let q = FieldSpec::Rationals;
        let big = q.int(i64::MAX);
        let sum = &big + &big;
        assert!(matches!(sum.0, Repr::Big(_)));
        let back = &sum - &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(_)));
    }

    #[test]
    fn inverses() {
        let q = FieldSpec::Rationals;
        let a = q.fraction(-3, 7).unwrap();
        assert!((&a * &a.inv()).is_one());
        let f5 = FieldSpec::prime(5).unwrap();
        for n in 1..5 {
            let x = f5.int(n);
            assert!((&x * &x.inv()).is_one());
        }
        assert!((&f5.int(3) + &f5.int(2)).is_zero());
    }

    #[test]
    fn parse_literals() {
        let q = FieldSpec::Rationals;
        assert_eq!(q.parse_scalar("6/4").unwrap(), q.fraction(3, 2).unwrap());
        assert!(q.parse_scalar("1/0").is_none());
        let f3 = FieldSpec::prime(3).unwrap();
        assert!(f3.parse_scalar("1/3").is_none());
        assert_eq!(f3.parse_scalar("-1").unwrap(), f3.int(2));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(FieldSpec::prime(9).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(7).is_ok());
    }

    #[test]
    #[should_panic]
    fn mixed_fields_panic() {
        let _ = &FieldSpec::Rationals.one() + &FieldSpec::Prime(5).one();
    }
}
