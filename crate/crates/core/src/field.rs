//! Exact scalar fields: prime fields `F_p` (odd `p`) and the rationals.
//!
//! Every algorithm in the crate is generic over [`Field`]. A field element
//! carries enough information to do arithmetic on its own; the associated
//! [`Field::Ctx`] is what is needed to conjure constants (zero, one, random
//! elements) out of thin air.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;

pub trait Field:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Copy + Eq + fmt::Debug + Send + Sync + 'static;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_i64(ctx: Self::Ctx, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    fn random<R: Rng + ?Sized>(ctx: Self::Ctx, rng: &mut R) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one(self.ctx())
    }

    /// `num / den`, or `None` when `den` vanishes in the field.
    fn from_ratio(ctx: Self::Ctx, num: i64, den: i64) -> Option<Self> {
        let d = Self::from_i64(ctx, den).inv()?;
        Some(Self::from_i64(ctx, num) * d)
    }

    /// `(-1)^n`.
    fn sign(ctx: Self::Ctx, n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Self::one(ctx)
        } else {
            -Self::one(ctx)
        }
    }
}

/// An odd prime modulus below 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Prime(u32);

impl Prime {
    pub const DEFAULT: Prime = Prime(32003);

    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(3..(1 << 31)).contains(&p) || p.is_multiple_of(2) || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(Prime(p as u32))
    }

    pub fn get(self) -> u32 {
        self.0
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

/// Element of `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    modulus: u32,
}

impl Fp {
    pub fn new(p: Prime, n: i64) -> Self {
        let m = p.0 as i64;
        Fp {
            value: n.rem_euclid(m) as u32,
            modulus: p.0,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp {
            value: 1,
            modulus: self.modulus,
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Print in the symmetric range so that -1 reads as -1.
        let v = self.value as i64;
        let m = self.modulus as i64;
        if v > m / 2 {
            write!(f, "{}", v - m)
        } else {
            write!(f, "{}", v)
        }
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let s = self.value as u64 + rhs.value as u64;
        let m = self.modulus as u64;
        Fp {
            value: if s >= m { (s - m) as u32 } else { s as u32 },
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        let m = self.modulus as u64;
        let s = self.value as u64 + m - rhs.value as u64;
        Fp {
            value: if s >= m { (s - m) as u32 } else { s as u32 },
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Fp {
            value: ((self.value as u64 * rhs.value as u64) % self.modulus as u64) as u32,
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl Field for Fp {
    type Ctx = Prime;

    fn ctx(&self) -> Prime {
        Prime(self.modulus)
    }
    fn zero(ctx: Prime) -> Self {
        Fp::new(ctx, 0)
    }
    fn one(ctx: Prime) -> Self {
        Fp::new(ctx, 1)
    }
    fn from_i64(ctx: Prime, n: i64) -> Self {
        Fp::new(ctx, n)
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus as u64 - 2))
        }
    }
    fn random<R: Rng + ?Sized>(ctx: Prime, rng: &mut R) -> Self {
        Fp {
            value: rng.gen_range(0..ctx.0),
            modulus: ctx.0,
        }
    }
}

/// Element of the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Field for Rational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: ()) -> Self {
        Rational(BigRational::zero())
    }
    fn one(_: ()) -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(_: (), n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }
    // Small integers keep coefficient growth in check during elimination.
    fn random<R: Rng + ?Sized>(_: (), rng: &mut R) -> Self {
        Rational::from_i64((), rng.gen_range(-50..=50))
    }
    fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl Rational {
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

/// Which field a problem is posed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSpec {
    Prime(u64),
    Rationals,
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Prime(Prime::DEFAULT.get() as u64)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
            FieldSpec::Rationals => write!(f, "Q"),
        }
    }
}

impl std::str::FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `rationals`, `Q`, a bare prime such as `32003`, or `F_p` / `Fp`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("rationals") || t == "Q" || t == "QQ" {
            return Ok(FieldSpec::Rationals);
        }
        let digits = t
            .trim_start_matches("F_")
            .trim_start_matches("GF")
            .trim_start_matches('F');
        let p: u64 = digits
            .parse()
            .map_err(|_| FieldError::Unparseable(s.to_string()))?;
        Prime::new(p)?;
        Ok(FieldSpec::Prime(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: Prime = Prime(32003);

    #[test]
    fn inverse_in_f5() {
        let p5 = Prime::new(5).unwrap();
        let two = Fp::new(p5, 2);
        assert_eq!(two.inv().unwrap(), Fp::new(p5, 3));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Prime::new(2).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(1 << 31).is_err());
        assert!(Prime::new(3).is_ok());
    }

    #[test]
    fn symmetric_display() {
        assert_eq!(Fp::new(P, -1).to_string(), "-1");
        assert_eq!(Fp::new(P, 7).to_string(), "7");
    }

    #[test]
    fn field_spec_parsing() {
        assert_eq!("32003".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(32003));
        assert_eq!("F_3".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(3));
        assert_eq!("rationals".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert!("12".parse::<FieldSpec>().is_err());
    }

    fn fp() -> impl Strategy<Value = Fp> {
        (0i64..32003).prop_map(|v| Fp::new(P, v))
    }

    fn q() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..50).prop_map(|(n, d)| Rational::new(n, d))
    }

    proptest! {
        #[test]
        fn fp_axioms(a in fp(), b in fp(), c in fp()) {
            prop_assert_eq!((a + b) - b, a);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            if !a.is_zero() {
                prop_assert!((a * a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn rational_axioms(a in q(), b in q(), c in q()) {
            prop_assert_eq!((a.clone() + b.clone()) - b.clone(), a.clone());
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c);
            if !a.is_zero() {
                prop_assert!((a.clone() * a.inv().unwrap()).is_one());
            }
        }
    }
}
