//! Scalars under two arithmetic policies.
//!
//! Every value is stored as a [`BigRational`]. Exact scalars never round. A
//! scalar carrying a precision `p` is rounded to a `p`-bit mantissa after
//! every operation (so it is always a dyadic rational) and carries an
//! absolute worst-case error bound that accumulates across operations.
//!
//! Mixing an exact operand with a precision-`p` operand yields a
//! precision-`p` result; two precision operands combine at the smaller
//! precision.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default mantissa width for non-exact systems.
pub const DEFAULT_PRECISION: u32 = 128;

/// Smallest precision accepted from configuration.
pub const MIN_PRECISION: u32 = 64;

/// Arithmetic policy for a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Exact,
    Precision(u32),
}

impl Arithmetic {
    /// The policy that can represent results of both operands.
    pub fn combine(self, other: Arithmetic) -> Arithmetic {
        match (self, other) {
            (Arithmetic::Exact, x) | (x, Arithmetic::Exact) => x,
            (Arithmetic::Precision(a), Arithmetic::Precision(b)) => Arithmetic::Precision(a.min(b)),
        }
    }

    /// Bring a seed value under this policy. Exact policy leaves the value
    /// untouched.
    pub fn lift(self, x: &Scalar) -> Scalar {
        match self {
            Arithmetic::Exact => x.clone(),
            Arithmetic::Precision(p) => x.with_precision(p),
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Arithmetic::Exact)
    }
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arithmetic::Exact => f.write_str("exact"),
            Arithmetic::Precision(p) => write!(f, "p{p}"),
        }
    }
}

#[derive(Clone)]
pub struct Scalar {
    value: BigRational,
    precision: Option<u32>,
    error: f64,
}

impl Scalar {
    pub fn exact(value: BigRational) -> Self {
        Scalar {
            value,
            precision: None,
            error: 0.0,
        }
    }

    pub fn zero() -> Self {
        Scalar::exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::exact(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `num / den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The exact binary value of a finite `f64`, optionally rounded.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Scalar::exact)
    }

    /// Parse `"p/q"`, an integer, or a decimal literal with optional
    /// exponent. The result is always exact.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let err = || Error::ParseScalar(s.to_string());
        if t.is_empty() {
            return Err(err());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Scalar::exact(BigRational::new(n, d)));
        }
        let (mantissa, exponent) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Scalar::exact(value))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn precision(&self) -> Option<u32> {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    pub fn arithmetic(&self) -> Arithmetic {
        match self.precision {
            None => Arithmetic::Exact,
            Some(p) => Arithmetic::Precision(p),
        }
    }

    /// Worst-case absolute distance from the value this scalar stands for.
    pub fn error_bound(&self) -> f64 {
        self.error
    }

    /// Re-express under precision `p` (rounding; the error bound grows by
    /// the rounding error).
    pub fn with_precision(&self, p: u32) -> Scalar {
        let p = match self.precision {
            Some(q) => q.min(p),
            None => p,
        };
        let (value, rounding) = round_to_bits(&self.value, p);
        Scalar {
            value,
            precision: Some(p),
            error: self.error + rounding,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Scalar {
        Scalar {
            value: self.value.abs(),
            precision: self.precision,
            error: self.error,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.value.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `base^exp` for a non-negative exponent.
    pub fn powi(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Equality up to `slack` times the combined error bounds. Exact values
    /// compare exactly.
    pub fn approx_eq(&self, other: &Scalar, slack: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            return self.value == other.value;
        }
        let diff = (&self.value - &other.value).abs().to_f64().unwrap_or(f64::INFINITY);
        diff <= slack * (self.error + other.error)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        decimal_string(&self.value, digits.max(1))
    }

    fn from_parts(value: BigRational, precision: Option<u32>, error: f64) -> Scalar {
        match precision {
            None => Scalar::exact(value),
            Some(p) => {
                let (value, rounding) = round_to_bits(&value, p);
                Scalar {
                    value,
                    precision: Some(p),
                    error: widen(error + rounding),
                }
            }
        }
    }
}

fn combined_precision(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

/// Inflate an f64 error sum slightly so bounds stay conservative under
/// floating-point rounding of the bookkeeping itself.
fn widen(e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * (1.0 + 4.0 * f64::EPSILON)
    }
}

fn floor_log2(num: &BigInt, den: &BigInt) -> i64 {
    let e = num.bits() as i64 - den.bits() as i64;
    let above = if e >= 0 {
        *num >= (den << e as usize)
    } else {
        (num << (-e) as usize) >= *den
    };
    if above {
        e
    } else {
        e - 1
    }
}

/// Round to the nearest dyadic with a `bits`-bit mantissa. Returns the
/// rounded value and a bound on the rounding error.
fn round_to_bits(v: &BigRational, bits: u32) -> (BigRational, f64) {
    if v.is_zero() {
        return (v.clone(), 0.0);
    }
    let num = v.numer().abs();
    let den = v.denom().clone();
    let e = floor_log2(&num, &den);
    let shift = bits as i64 - 1 - e;
    // Already representable: the denominator is a power of two no larger
    // than the shift and the numerator fits in the mantissa.
    let (n2, d2) = if shift >= 0 {
        (num << shift as usize, den)
    } else {
        (num, den << (-shift) as usize)
    };
    let (q, r) = n2.div_rem(&d2);
    if r.is_zero() {
        return (v.clone(), 0.0);
    }
    let q = if r * 2 >= d2 { q + 1 } else { q };
    let mut out = if shift >= 0 {
        BigRational::new(q, BigInt::one() << shift as usize)
    } else {
        BigRational::from_integer(q << (-shift) as usize)
    };
    if v.is_negative() {
        out = -out;
    }
    let bound = 2f64.powi((e - bits as i64).clamp(i32::MIN as i64, i32::MAX as i64) as i32);
    (out, bound)
}

fn decimal_string(v: &BigRational, digits: usize) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let negative = v.is_negative();
    let a = v.abs();
    // exponent10 such that 10^e <= a < 10^(e+1)
    let mut e10 = ((a.numer().bits() as f64 - a.denom().bits() as f64) * std::f64::consts::LOG10_2)
        .floor() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    while pow10(e10) > a {
        e10 -= 1;
    }
    while pow10(e10 + 1) <= a {
        e10 += 1;
    }
    let scale = digits as i64 - 1 - e10;
    let scaled = &a * pow10(scale);
    let mut mant = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    if mant >= num_traits::pow(BigInt::from(10), digits) {
        mant /= 10;
        e10 += 1;
    }
    let mut s = mant.to_string();
    // trim trailing zeros of the mantissa
    while s.len() > 1 && s.ends_with('0') {
        s.pop();
    }
    let body = if (-6..=20).contains(&e10) {
        if e10 >= 0 {
            let int_len = (e10 + 1) as usize;
            if s.len() <= int_len {
                format!("{s}{}", "0".repeat(int_len - s.len()))
            } else {
                format!("{}.{}", &s[..int_len], &s[int_len..])
            }
        } else {
            format!("0.{}{s}", "0".repeat((-e10 - 1) as usize))
        }
    } else if s.len() == 1 {
        format!("{s}e{e10}")
    } else {
        format!("{}.{}e{e10}", &s[..1], &s[1..])
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            None => {
                if self.value.is_integer() {
                    write!(f, "{}", self.value.numer())
                } else {
                    write!(f, "{}/{}", self.value.numer(), self.value.denom())
                }
            }
            Some(p) => {
                let digits = ((p as f64) * std::f64::consts::LOG10_2).floor() as usize;
                f.write_str(&decimal_string(&self.value, digits.max(1)))
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            None => write!(f, "{self}"),
            Some(p) => write!(f, "{self}~p{p}(±{:e})", self.error),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Scalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn add_impl(a: &Scalar, b: &Scalar) -> Scalar {
    Scalar::from_parts(
        &a.value + &b.value,
        combined_precision(a.precision, b.precision),
        a.error + b.error,
    )
}

fn sub_impl(a: &Scalar, b: &Scalar) -> Scalar {
    Scalar::from_parts(
        &a.value - &b.value,
        combined_precision(a.precision, b.precision),
        a.error + b.error,
    )
}

fn mul_impl(a: &Scalar, b: &Scalar) -> Scalar {
    let error = if a.error == 0.0 && b.error == 0.0 {
        0.0
    } else {
        let (fa, fb) = (a.to_f64().abs(), b.to_f64().abs());
        fa * b.error + fb * a.error + a.error * b.error
    };
    Scalar::from_parts(
        &a.value * &b.value,
        combined_precision(a.precision, b.precision),
        error,
    )
}

fn div_impl(a: &Scalar, b: &Scalar) -> Scalar {
    assert!(!b.value.is_zero(), "scalar division by zero");
    let error = if a.error == 0.0 && b.error == 0.0 {
        0.0
    } else {
        let fb = b.to_f64().abs();
        let q = (a.to_f64() / b.to_f64()).abs();
        let margin = fb - b.error;
        if margin > 0.0 {
            (a.error + q * b.error) / margin
        } else {
            f64::INFINITY
        }
    };
    Scalar::from_parts(
        &a.value / &b.value,
        combined_precision(a.precision, b.precision),
        error,
    )
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $imp(self, rhs)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $imp(&self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $imp(&self, rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $imp(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            value: -self.value,
            precision: self.precision,
            error: self.error,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(Scalar::parse("1/3").unwrap(), Scalar::ratio(1, 3));
        assert_eq!(Scalar::parse("-2/4").unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::parse("0.25").unwrap(), Scalar::ratio(1, 4));
        assert_eq!(Scalar::parse("-.5").unwrap(), Scalar::ratio(-1, 2));
        assert_eq!(Scalar::parse("1e-3").unwrap(), Scalar::ratio(1, 1000));
        assert_eq!(Scalar::parse("2.5E2").unwrap(), Scalar::from_integer(250));
        assert_eq!(Scalar::parse("7").unwrap(), Scalar::from_integer(7));
        for bad in ["", "1/0", "abc", "1..2", "0x10", "."] {
            assert!(Scalar::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips_exact_values() {
        for s in ["1/3", "-7/9", "12", "0"] {
            let x = Scalar::parse(s).unwrap();
            assert_eq!(x.to_string(), s);
            assert_eq!(Scalar::parse(&x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn precision_rounding_is_bounded() {
        let third = Scalar::ratio(1, 3).with_precision(64);
        assert!(!third.is_exact());
        let diff = (third.value() - BigRational::new(1.into(), 3.into())).abs();
        assert!(diff.to_f64().unwrap() <= third.error_bound());
        assert!(third.error_bound() < 1e-19);
        // dyadic with at most 64 mantissa bits
        assert!(third.value().denom().bits() <= 66);
    }

    #[test]
    fn exact_dyadics_survive_rounding() {
        let x = Scalar::ratio(3, 8).with_precision(64);
        assert_eq!(x.error_bound(), 0.0);
        assert_eq!(x, Scalar::ratio(3, 8));
    }

    #[test]
    fn mixed_operands_round() {
        let a = Scalar::ratio(1, 3).with_precision(80);
        let b = Scalar::ratio(1, 7);
        let c = &a * &b;
        assert_eq!(c.precision(), Some(80));
        let truth = 1.0 / 21.0;
        assert!((c.to_f64() - truth).abs() <= c.error_bound() + 1e-300);
        let d = &a + &Scalar::ratio(1, 5).with_precision(70);
        assert_eq!(d.precision(), Some(70));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Scalar::ratio(1, 4).to_decimal_string(10), "0.25");
        assert_eq!(Scalar::ratio(2, 3).to_decimal_string(5), "0.66667");
        assert_eq!(Scalar::ratio(-1, 8).to_decimal_string(3), "-0.125");
        assert_eq!(Scalar::from_integer(1200).to_decimal_string(6), "1200");
        assert_eq!(Scalar::ratio(1, 3_000_000_000).to_decimal_string(3), "3.33e-10");
        assert_eq!(Scalar::ratio(999_999, 1_000_000).to_decimal_string(3), "1");
    }

    #[test]
    fn arithmetic_combination() {
        use Arithmetic::*;
        assert_eq!(Exact.combine(Exact), Exact);
        assert_eq!(Exact.combine(Precision(100)), Precision(100));
        assert_eq!(Precision(64).combine(Precision(100)), Precision(64));
    }
}
