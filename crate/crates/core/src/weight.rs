//! Exact edge weights and the scalar abstraction shared by every algorithm.
//!
//! All correctness work runs on [`Weight`], an arbitrary-precision rational.
//! The algorithms are generic over [`Scalar`] so the same code can also run
//! on `f64` for throughput measurements.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("cannot parse weight `{0}`")]
    Parse(String),
    #[error("weight `{0}` has a zero denominator")]
    ZeroDenominator(String),
    #[error("weight {0} is negative")]
    Negative(String),
}

/// A non-negative exact rational.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(BigRational);

impl Weight {
    pub fn new(value: BigRational) -> Result<Self, WeightError> {
        if value.is_negative() {
            return Err(WeightError::Negative(value.to_string()));
        }
        Ok(Weight(value))
    }

    /// `numer / denom`. Panics if `denom == 0` or the ratio is negative.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        let r = BigRational::new(BigInt::from(numer), BigInt::from(denom));
        assert!(!r.is_negative(), "negative weight {r}");
        Weight(r)
    }

    pub fn integer(value: u64) -> Self {
        Weight(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Integer power.
    pub fn pow(&self, exp: u32) -> Self {
        Weight(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Renders the value rounded half-up to `digits` decimal places.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled: BigInt = self.0.numer() * &scale * 2 + self.0.denom();
        let rounded = scaled.div_floor(&(self.0.denom() * 2));
        let (int_part, frac_part) = rounded.div_rem(&scale);
        if digits == 0 {
            int_part.to_string()
        } else {
            format!(
                "{int_part}.{:0>width$}",
                frac_part.to_string(),
                width = digits
            )
        }
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight(BigRational::zero())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Always `p/q` (or `p` for integers), never a rounded decimal.
impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts `p`, `p/q` and finite decimals such as `1.25`; all parse exactly.
impl FromStr for Weight {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || WeightError::Parse(s.to_string());
        let value = if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(WeightError::ZeroDenominator(s.to_string()));
            }
            BigRational::new(p, q)
        } else if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int: BigInt = match int {
                "" | "+" | "-" => BigInt::zero(),
                _ => int.parse().map_err(|_| bad())?,
            };
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac: BigInt = frac.parse().map_err(|_| bad())?;
            let magnitude = int.abs() * &scale + frac;
            let numer = if negative { -magnitude } else { magnitude };
            BigRational::new(numer, scale)
        } else {
            BigRational::from_integer(s.parse().map_err(|_| bad())?)
        };
        Weight::new(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Weight {
            type Output = Weight;
            fn $method(self, rhs: Weight) -> Weight {
                Weight(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Weight> for &'a Weight {
            type Output = Weight;
            fn $method(self, rhs: &'a Weight) -> Weight {
                Weight((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

// Subtraction is only used where the result is known to be non-negative.
impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        let r = self.0 - rhs.0;
        debug_assert!(!r.is_negative(), "weight subtraction went negative: {r}");
        Weight(r)
    }
}

impl<'a> Sub<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn sub(self, rhs: &'a Weight) -> Weight {
        let r = &self.0 - &rhs.0;
        debug_assert!(!r.is_negative(), "weight subtraction went negative: {r}");
        Weight(r)
    }
}

impl Zero for Weight {
    fn zero() -> Self {
        Weight(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Weight {
    fn one() -> Self {
        Weight(BigRational::one())
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Self {
        iter.fold(Weight::zero(), |acc, w| acc + w)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Self {
        Weight(iter.fold(BigRational::zero(), |acc, w| acc + &w.0))
    }
}

/// Numeric type the streaming algorithms and the oracle run on.
///
/// `Weight` gives exact results; `f64` exists for throughput runs where
/// knife-edge comparisons may round either way.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn from_weight(w: &Weight) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for Weight {
    fn from_weight(w: &Weight) -> Self {
        w.clone()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_weight(w: &Weight) -> Self {
        w.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}
