//! Numeric scalars shared by every module.
//!
//! A [`Scalar`] is either an exact arbitrary-precision rational or an `f64`.
//! The two modes never mix: exact code paths stay exact end to end, and the
//! approximate mode only exists for domains with irrational support values
//! (balls and support oracles).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for tie detection in approximate mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Approximate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Approximate => f.write_str("approximate"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        Self::from_int(0, mode)
    }

    pub fn one(mode: Mode) -> Self {
        Self::from_int(1, mode)
    }

    pub fn from_int(v: i64, mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Approximate => Scalar::Approx(v as f64),
        }
    }

    /// Exact rational `num/den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(v: i64) -> Self {
        Self::from_int(v, Mode::Exact)
    }

    pub fn approx(v: f64) -> Self {
        Scalar::Approx(v)
    }

    pub fn from_big(v: BigRational) -> Self {
        Scalar::Exact(v)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Approx(_) => Mode::Approximate,
        }
    }

    pub fn ensure_mode(&self, mode: Mode) -> Result<()> {
        if self.mode() == mode {
            Ok(())
        } else {
            Err(Error::ModeMismatch {
                expected: mode,
                found: self.mode(),
            })
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => ratio_to_f64(r),
            Scalar::Approx(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => *v == 0.0,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
            Scalar::Approx(v) => {
                if *v > 0.0 {
                    1
                } else if *v < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(v) => Scalar::Approx(v.abs()),
        }
    }

    /// Largest integer not above the value.
    pub fn floor_int(&self) -> BigInt {
        match self {
            Scalar::Exact(r) => r.floor().to_integer(),
            Scalar::Approx(v) => BigInt::from(v.floor() as i64),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_integer(),
            Scalar::Approx(v) => v.fract() == 0.0,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Total comparison for values of the same mode.
    pub fn cmp_same(&self, other: &Self) -> Ordering {
        self.partial_cmp(other)
            .expect("comparison of scalars in different modes or NaN")
    }

    /// Equality in exact mode, `|a - b| <= tol` in approximate mode.
    pub fn ties(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Approx(a), Scalar::Approx(b)) => (a - b).abs() <= tol,
            _ => mixed(),
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r * BigInt::from(k)),
            Scalar::Approx(v) => Scalar::Approx(v * k as f64),
        }
    }

    /// Parse `"p/q"`, `"p"` or a decimal literal. Decimal literals are
    /// converted exactly in exact mode.
    pub fn parse(s: &str, mode: Mode) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid number {s:?}"));
        match mode {
            Mode::Exact => {
                if let Some((n, d)) = s.split_once('/') {
                    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                    if d.is_zero() {
                        return Err(bad());
                    }
                    Ok(Scalar::Exact(BigRational::new(n, d)))
                } else if let Ok(n) = BigInt::from_str(s) {
                    Ok(Scalar::Exact(BigRational::from_integer(n)))
                } else {
                    parse_decimal(s).map(Scalar::Exact).ok_or_else(bad)
                }
            }
            Mode::Approximate => {
                if let Some((n, d)) = s.split_once('/') {
                    let n: f64 = n.trim().parse().map_err(|_| bad())?;
                    let d: f64 = d.trim().parse().map_err(|_| bad())?;
                    Ok(Scalar::Approx(n / d))
                } else {
                    s.parse::<f64>().map(Scalar::Approx).map_err(|_| bad())
                }
            }
        }
    }

    /// Decimal rendering with `digits` significant digits (display only).
    pub fn to_decimal(&self, digits: usize) -> String {
        let v = self.to_f64();
        if v == 0.0 {
            return "0".to_string();
        }
        let s = format!("{:.*e}", digits.saturating_sub(1), v);
        // Normalise through f64 parsing so trailing zeros disappear.
        let parsed: f64 = s.parse().unwrap_or(v);
        format!("{parsed}")
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
        || (int_part.is_empty() && frac_part.is_empty())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Conversion that stays accurate for huge numerators and denominators.
pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    let (n, d) = if shift > 0 {
        (r.numer() >> shift as usize, r.denom() >> shift as usize)
    } else {
        (r.numer().clone(), r.denom().clone())
    };
    let d = if d.is_zero() { BigInt::one() } else { d };
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}

#[cold]
fn mixed() -> ! {
    panic!("arithmetic between exact and approximate scalars")
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Approx(a), Scalar::Approx(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            (Scalar::Approx(a), Scalar::Approx(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a $op b),
                    _ => mixed(),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a $op b),
                    _ => mixed(),
                }
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Scalar::Exact(a / b)
            }
            (Scalar::Approx(a), Scalar::Approx(b)) => Scalar::Approx(a / b),
            _ => mixed(),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        &self / rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(a) => Scalar::Approx(-a),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.clone().neg()
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => *a += b,
            (Scalar::Approx(a), Scalar::Approx(b)) => *a += b,
            _ => mixed(),
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => *a -= b,
            (Scalar::Approx(a), Scalar::Approx(b)) => *a -= b,
            _ => mixed(),
        }
    }
}

/// Exact scalars serialize as `"p/q"` strings, approximate ones as numbers.
impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => s.serialize_str(&self.to_string()),
            Scalar::Approx(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => Scalar::parse(&t, Mode::Exact).map_err(serde::de::Error::custom),
            Repr::Number(v) => Ok(Scalar::Approx(v)),
        }
    }
}

/// Lowest common denominator of a set of exact scalars (1 for integers).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> BigInt {
    values
        .into_iter()
        .filter_map(Scalar::as_exact)
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
