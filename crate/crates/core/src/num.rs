//! Scalar abstraction: exact rational arithmetic when every input length is
//! rational, binary64 otherwise.
//!
//! All graph-native geometry (distances, breakpoints, slopes) is generic over
//! [`Scalar`], so the same code path runs exactly under [`Rat`] and with a
//! 1e-12 comparison tolerance under `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero as _};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Absolute comparison tolerance used by the `f64` instance.
pub const F64_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion of the given double (every finite f64 is rational).
    fn from_f64_lossy(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn cmp_total(&self, other: &Self) -> Ordering;
    /// Parses `"p/q"`, integers and plain decimal strings.
    fn parse_number(s: &str) -> Option<Self>;
    /// Round-trippable textual form (`"3/2"` exact, shortest decimal for f64).
    fn repr(&self) -> String;

    /// Equality up to the mode's tolerance (exact equality under `Rat`).
    fn is_close(&self, other: &Self) -> bool;
    /// `self <= other` up to the mode's tolerance.
    fn le_close(&self, other: &Self) -> bool;

    fn abs_s(&self) -> Self {
        if self.cmp_total(&Self::zero()) == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_zero_s(&self) -> bool {
        self.is_close(&Self::zero())
    }
    fn min_s(self, other: Self) -> Self {
        if self.cmp_total(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }
    fn max_s(self, other: Self) -> Self {
        if self.cmp_total(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }
    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }
    /// `ceil(len / h)`, at least 1. Used for edge subdivision counts.
    fn ceil_div(len: &Self, h: &Self) -> usize;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64_lossy(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
    fn parse_number(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            if d == 0.0 {
                return None;
            }
            return Some(n / d);
        }
        s.parse().ok()
    }
    fn repr(&self) -> String {
        format!("{self}")
    }
    fn is_close(&self, other: &Self) -> bool {
        (self - other).abs() <= F64_TOL
    }
    fn le_close(&self, other: &Self) -> bool {
        *self <= other + F64_TOL
    }
    fn abs_s(&self) -> Self {
        self.abs()
    }
    fn ceil_div(len: &Self, h: &Self) -> usize {
        ((len / h).ceil() as usize).max(1)
    }
}

/// Arbitrary-precision rational scalar.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    pub fn int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// Parses `"p/q"`, `"-3"`, or a plain decimal such as `"0.25"`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() {
            return None;
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(Rat(BigRational::new(n, d)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let neg = int_part.starts_with('-');
            let int_digits = int_part.trim_start_matches(['-', '+']);
            if !int_digits.chars().all(|c| c.is_ascii_digit())
                || !frac_part.chars().all(|c| c.is_ascii_digit())
                || frac_part.is_empty()
            {
                return None;
            }
            let int_val: BigInt = if int_digits.is_empty() {
                BigInt::from(0)
            } else {
                int_digits.parse().ok()?
            };
            let frac_val: BigInt = frac_part.parse().ok()?;
            let den = BigInt::from(10).pow(frac_part.len() as u32);
            let mut num = int_val * &den + frac_val;
            if neg {
                num = -num;
            }
            return Some(Rat(BigRational::new(num, den)));
        }
        let n: BigInt = s.parse().ok()?;
        Some(Rat(BigRational::from_integer(n)))
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr())
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
    };
}
rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rat::int(0)
    }
    fn one() -> Self {
        Rat::int(1)
    }
    fn from_int(n: i64) -> Self {
        Rat::int(n)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rat::new(num, den)
    }
    fn from_f64_lossy(x: f64) -> Self {
        Rat(BigRational::from_float(x).expect("finite float"))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
    fn parse_number(s: &str) -> Option<Self> {
        Rat::parse(s)
    }
    fn repr(&self) -> String {
        if self.0.is_integer() {
            format!("{}", self.0.numer())
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }
    fn is_close(&self, other: &Self) -> bool {
        self == other
    }
    fn le_close(&self, other: &Self) -> bool {
        self <= other
    }
    fn abs_s(&self) -> Self {
        Rat(self.0.abs())
    }
    fn ceil_div(len: &Self, h: &Self) -> usize {
        let q = (&len.0 / &h.0).ceil();
        q.to_integer().to_usize().unwrap_or(1).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_parsing() {
        assert_eq!(Rat::parse("3/2").unwrap(), Rat::new(3, 2));
        assert_eq!(Rat::parse("0.25").unwrap(), Rat::new(1, 4));
        assert_eq!(Rat::parse("-1.5").unwrap(), Rat::new(-3, 2));
        assert_eq!(Rat::parse("7").unwrap(), Rat::int(7));
        assert_eq!(Rat::parse(".5"), Some(Rat::new(1, 2)));
        assert!(Rat::parse("1/0").is_none());
        assert!(Rat::parse("abc").is_none());
    }

    #[test]
    fn rat_repr_round_trips() {
        for s in ["3/2", "-7/3", "5", "0"] {
            let r = Rat::parse(s).unwrap();
            assert_eq!(Rat::parse(&r.repr()).unwrap(), r);
        }
    }

    #[test]
    fn f64_parse_accepts_ratios() {
        assert_eq!(f64::parse_number("1/4"), Some(0.25));
        assert_eq!(f64::parse_number("0.5"), Some(0.5));
    }

    #[test]
    fn ceil_div_counts() {
        assert_eq!(Rat::ceil_div(&Rat::int(3), &Rat::new(1, 4)), 12);
        assert_eq!(Rat::ceil_div(&Rat::int(1), &Rat::new(1, 3)), 3);
        assert_eq!(Rat::ceil_div(&Rat::new(1, 2), &Rat::int(1)), 1);
        assert_eq!(f64::ceil_div(&1.0, &0.3), 4);
    }
}
