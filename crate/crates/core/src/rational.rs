//! Exact rational scalars.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

/// How to drop digits when rendering a decimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// Round half away from zero.
    Nearest,
    /// Drop the tail (toward zero).
    Truncate,
}

/// A decimal in `0.d1d2...dn x 10^e` form, `d1 != 0` unless the value is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scientific {
    pub negative: bool,
    pub digits: String,
    pub exponent: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigs(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Self {
        if exp >= 0 {
            Rational(num_traits::pow(self.0.clone(), exp as usize))
        } else {
            let inv = self.0.recip();
            Rational(num_traits::pow(inv, exp.unsigned_abs() as usize))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn max_ref<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    /// Render as `0.d1..dn x 10^e` with `sig` significant digits.
    pub fn to_scientific(&self, sig: usize, mode: Rounding) -> Scientific {
        assert!(sig > 0);
        if self.is_zero() {
            return Scientific {
                negative: false,
                digits: "0".repeat(sig),
                exponent: 0,
            };
        }
        let negative = self.is_negative();
        let a = self.0.abs();
        // choose e with 10^(e-1) <= a < 10^e
        let mut e = estimate_exponent(&a);
        loop {
            let lo = pow10(e - 1);
            let hi = pow10(e);
            if a < lo {
                e -= 1;
            } else if a >= hi {
                e += 1;
            } else {
                break;
            }
        }
        // scaled = a * 10^(sig - e), take integer part
        let scaled = &a * pow10(sig as i64 - e);
        let (q, rem) = scaled.numer().div_rem(scaled.denom());
        let mut digits_int = q;
        if mode == Rounding::Nearest && &rem * BigInt::from(2) >= *scaled.denom() {
            digits_int += BigInt::one();
        }
        let mut s = digits_int.to_str_radix(10);
        if s.len() > sig {
            // rounding carried into a new digit
            s.truncate(sig);
            e += 1;
        }
        Scientific {
            negative,
            digits: s,
            exponent: e,
        }
    }

    /// Plain decimal with exactly `places` digits after the point.
    pub fn to_fixed(&self, places: usize, mode: Rounding) -> String {
        let negative = self.is_negative();
        let a = self.0.abs();
        let scaled = &a * pow10(places as i64);
        let (q, rem) = scaled.numer().div_rem(scaled.denom());
        let mut v = q;
        if mode == Rounding::Nearest && &rem * BigInt::from(2) >= *scaled.denom() {
            v += BigInt::one();
        }
        let mut s = v.to_str_radix(10);
        if s.len() <= places {
            s = format!("{}{}", "0".repeat(places + 1 - s.len()), s);
        }
        let split = s.len() - places;
        let body = if places == 0 {
            s
        } else {
            format!("{}.{}", &s[..split], &s[split..])
        };
        if negative && v_nonzero(&body) {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Short decimal like `5.332440874e-3`, for reports.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let s = self.to_scientific(sig, Rounding::Nearest);
        let sign = if s.negative { "-" } else { "" };
        let (head, tail) = s.digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{}", s.exponent - 1)
        } else {
            format!("{sign}{head}.{tail}e{}", s.exponent - 1)
        }
    }
}

fn v_nonzero(body: &str) -> bool {
    body.chars().any(|c| c.is_ascii_digit() && c != '0')
}

fn pow10(e: i64) -> BigRational {
    let ten = BigInt::from(10);
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(
            BigInt::one(),
            num_traits::pow(ten, e.unsigned_abs() as usize),
        )
    }
}

fn estimate_exponent(a: &BigRational) -> i64 {
    let nd = a.numer().to_str_radix(10).len() as i64;
    let dd = a.denom().to_str_radix(10).len() as i64;
    nd - dd + 1
}

impl Scientific {
    /// Mantissa-first rendering, e.g. `-0.1234567890e-3`.
    pub fn render(&self) -> String {
        let sign = if self.negative { "-" } else { "" };
        format!("{sign}0.{}e{}", self.digits, self.exponent)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p`, `p/q` and finite decimals like `-0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((p, q)) = t.split_once('/') {
            let p = BigInt::from_str(p.trim())
                .map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
            let q = BigInt::from_str(q.trim())
                .map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
            return Rational::from_bigs(p, q);
        }
        if let Some((ip, fp)) = t.split_once('.') {
            let neg = ip.starts_with('-');
            let ip_digits = ip.trim_start_matches(['-', '+']);
            let all = format!(
                "{}{}",
                if ip_digits.is_empty() { "0" } else { ip_digits },
                fp
            );
            let mut n =
                BigInt::from_str(&all).map_err(|_| Error::Parse(format!("bad decimal {t:?}")))?;
            if neg {
                n = -n;
            }
            let d = num_traits::pow(BigInt::from(10), fp.len());
            return Rational::from_bigs(n, d);
        }
        let n = BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad integer {t:?}")))?;
        Ok(Rational(BigRational::from_integer(n)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rational::from_str(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                Rational((self.0).$m(o.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: &'a Rational) -> Rational {
                Rational((self.0).$m(&o.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                Rational((&self.0).$m(o.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, o: &'b Rational) -> Rational {
                Rational((&self.0).$m(&o.0))
            }
        }
        impl $atr<Rational> for Rational {
            fn $am(&mut self, o: Rational) {
                (self.0).$am(o.0);
            }
        }
        impl<'a> $atr<&'a Rational> for Rational {
            fn $am(&mut self, o: &'a Rational) {
                (self.0).$am(&o.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);
binop!(Div, div, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}

/// Compare magnitudes of two rationals.
pub fn cmp_abs(a: &Rational, b: &Rational) -> Ordering {
    a.abs().cmp(&b.abs())
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(a: &Rational) -> i32 {
    match a.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = Rational::new(6, -8);
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!(q("10/4"), q("5/2"));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(q("7"), Rational::from_integer(7));
        assert_eq!(q("-0.25"), Rational::new(-1, 4));
        assert_eq!(q(" 3 / 9 "), Rational::new(1, 3));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn scientific_round_and_truncate() {
        let a = Rational::new(239, 44820);
        let s = a.to_scientific(10, Rounding::Nearest);
        assert_eq!((s.digits.as_str(), s.exponent), ("5332440875", -2));
        let s = a.to_scientific(10, Rounding::Truncate);
        assert_eq!((s.digits.as_str(), s.exponent), ("5332440874", -2));
        let t = Rational::new(2, 3).to_scientific(4, Rounding::Truncate);
        assert_eq!((t.digits.as_str(), t.exponent), ("6666", 0));
        let r = Rational::new(2, 3).to_scientific(4, Rounding::Nearest);
        assert_eq!((r.digits.as_str(), r.exponent), ("6667", 0));
    }

    #[test]
    fn scientific_carry() {
        let s = Rational::new(9999, 1000).to_scientific(2, Rounding::Nearest);
        assert_eq!((s.digits.as_str(), s.exponent), ("10", 2));
    }

    #[test]
    fn fixed_rendering() {
        assert_eq!(
            Rational::new(-1, 8).to_fixed(2, Rounding::Truncate),
            "-0.12"
        );
        assert_eq!(Rational::new(1, 8).to_fixed(2, Rounding::Nearest), "0.13");
        assert_eq!(
            Rational::from_integer(6).to_fixed(0, Rounding::Nearest),
            "6"
        );
    }

    #[test]
    fn pow_negative() {
        assert_eq!(Rational::new(1, 5).pow(-2), Rational::from_integer(25));
        assert_eq!(Rational::new(2, 3).pow(0), Rational::one());
    }
}
