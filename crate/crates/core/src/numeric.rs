//! Scalar abstraction shared by the exact and floating-point solver modes.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used for all exact state.
pub type Rational = BigRational;

/// Builds `num/den` as a rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Converts an unsigned quantity from the instance model.
pub fn uint(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Formats a rational as `num/den`, always with an explicit denominator.
pub fn fmt_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `7`, `-3/4` or `12/8` (normalized).
pub fn parse_fraction(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim().parse::<BigInt>().ok()?, b.trim().parse::<BigInt>().ok()?),
        None => (text.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Smallest `k >= 0` with `base^k >= target`, for `base > 1`.
pub fn ceil_log(base: &Rational, target: &Rational) -> u64 {
    assert!(base > &Rational::one(), "ceil_log needs base > 1");
    let mut k = 0u64;
    let mut acc = Rational::one();
    while &acc < target {
        acc *= base;
        k += 1;
    }
    k
}

/// Numeric type the solvers are generic over.
///
/// Owned-value operators take the right operand by reference so that exact
/// arithmetic avoids needless clones.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
    + Zero
    + One
{
    const EXACT: bool;
    fn from_rational(q: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn to_f64(&self) -> f64;
    /// `floor(self)` for non-negative values, saturating at `u64::MAX`.
    fn floor_u64(&self) -> u64;

    fn from_u64(v: u64) -> Self {
        Self::from_rational(&uint(v))
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `self^exp` by repeated squaring.
    fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn floor_u64(&self) -> u64 {
        let fl = self.numer().div_floor(self.denom());
        fl.to_u64().unwrap_or(if fl.is_negative() { 0 } else { u64::MAX })
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Zero::zero)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor_u64(&self) -> u64 {
        if *self <= 0.0 {
            0
        } else if *self >= u64::MAX as f64 {
            u64::MAX
        } else {
            self.floor() as u64
        }
    }
}

/// Comparison context: exact when `eta` is zero, tolerant otherwise.
#[derive(Debug, Clone)]
pub struct Tol<S> {
    pub eta: S,
}

impl<S: Scalar> Tol<S> {
    pub fn exact() -> Self {
        Tol { eta: S::zero() }
    }

    pub fn new(eta: S) -> Self {
        Tol { eta }
    }

    /// `x > eta`.
    pub fn pos(&self, x: &S) -> bool {
        *x > self.eta
    }

    /// `|x| <= eta`.
    pub fn zero(&self, x: &S) -> bool {
        x.abs() <= self.eta
    }

    /// `a <= b` up to tolerance.
    pub fn le(&self, a: &S, b: &S) -> bool {
        a.clone() - b <= self.eta
    }

    /// `a < b` beyond tolerance.
    pub fn lt(&self, a: &S, b: &S) -> bool {
        b.clone() - a > self.eta
    }

    pub fn eq(&self, a: &S, b: &S) -> bool {
        (a.clone() - b).abs() <= self.eta
    }

    /// Replaces values within tolerance of zero by exact zero.
    pub fn snap_zero(&self, x: &mut S) {
        if !S::EXACT && self.zero(x) {
            *x = S::zero();
        }
    }

    /// Replaces `x` by `target` when they agree within tolerance.
    pub fn snap_to(&self, x: &mut S, target: &S) {
        if !S::EXACT && self.eq(x, target) {
            *x = target.clone();
        }
    }
}

pub fn min_s<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

pub fn max_s<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}
