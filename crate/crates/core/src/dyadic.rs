//! Dyadic fixed-point numbers and outward-rounded intervals.
//!
//! All certified real-number work in this crate runs on exact dyadic
//! endpoints `mant * 2^exp`; floating point is never involved. Additions and
//! integer scalings are exact, and conversions from rationals round outward.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::poly::{Int, Rat};

/// Exact dyadic rational `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mant: Int,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: Int, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn zero() -> Self {
        Dyadic::new(Int::zero(), 0)
    }

    pub fn from_int(n: Int) -> Self {
        Dyadic::new(n, 0)
    }

    /// `2^exp`.
    pub fn power_of_two(exp: i64) -> Self {
        Dyadic::new(Int::from(1), exp)
    }

    /// Largest dyadic with denominator `2^frac_bits` that is `<= x`.
    pub fn from_rat_floor(x: &Rat, frac_bits: u64) -> Self {
        let scaled = (x.numer() << frac_bits).div_floor(x.denom());
        Dyadic::new(scaled, -(frac_bits as i64))
    }

    /// Smallest dyadic with denominator `2^frac_bits` that is `>= x`.
    pub fn from_rat_ceil(x: &Rat, frac_bits: u64) -> Self {
        let scaled = (x.numer() << frac_bits).div_ceil(x.denom());
        Dyadic::new(scaled, -(frac_bits as i64))
    }

    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.mant << self.exp as u64)
        } else {
            Rat::new(self.mant.clone(), Int::from(1) << (-self.exp) as u64)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    fn aligned(&self, other: &Dyadic) -> (Int, Int, i64) {
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &other.mant << (other.exp - exp) as u64;
        (a, b, exp)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic::new(a + b, exp)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic::new(a - b, exp)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.mant, self.exp)
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.mant.abs(), self.exp)
    }

    /// Exact product with an integer.
    pub fn scale_int(&self, k: &Int) -> Dyadic {
        Dyadic::new(&self.mant * k, self.exp)
    }

    /// Exact halving.
    pub fn half(&self) -> Dyadic {
        Dyadic::new(self.mant.clone(), self.exp - 1)
    }

    /// Approximate decimal rendering with `digits` fractional digits,
    /// rounded toward zero. For display only.
    pub fn to_decimal(&self, digits: usize) -> String {
        let sign = if self.mant.is_negative() { "-" } else { "" };
        let pow10 = Int::from(10).pow(digits as u32);
        let num = self.mant.abs() * &pow10;
        let scaled = if self.exp >= 0 {
            num << self.exp as u64
        } else {
            num >> (-self.exp) as u64
        };
        let (int_part, frac_part) = scaled.div_rem(&pow10);
        format!("{sign}{int_part}.{frac_part:0>width$}", width = digits)
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.to_rat().to_f64()
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

/// Closed interval with dyadic endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        DyadicInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    /// Encloses the rational interval `[lo, hi]` with outward rounding at
    /// `frac_bits` fractional bits.
    pub fn enclosing(lo: &Rat, hi: &Rat, frac_bits: u64) -> Self {
        DyadicInterval::new(
            Dyadic::from_rat_floor(lo, frac_bits),
            Dyadic::from_rat_ceil(hi, frac_bits),
        )
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).half()
    }

    pub fn add(&self, other: &DyadicInterval) -> DyadicInterval {
        DyadicInterval::new(self.lo.add(&other.lo), self.hi.add(&other.hi))
    }

    pub fn sub(&self, other: &DyadicInterval) -> DyadicInterval {
        DyadicInterval::new(self.lo.sub(&other.hi), self.hi.sub(&other.lo))
    }

    pub fn neg(&self) -> DyadicInterval {
        DyadicInterval::new(self.hi.neg(), self.lo.neg())
    }

    /// Exact scaling by an integer (sign-aware).
    pub fn scale_int(&self, k: &Int) -> DyadicInterval {
        let a = self.lo.scale_int(k);
        let b = self.hi.scale_int(k);
        if k.is_negative() {
            DyadicInterval::new(b, a)
        } else {
            DyadicInterval::new(a, b)
        }
    }

    /// Exact shift by an integer: `self - k`.
    pub fn sub_int(&self, k: &Int) -> DyadicInterval {
        let k = Dyadic::from_int(k.clone());
        DyadicInterval::new(self.lo.sub(&k), self.hi.sub(&k))
    }

    /// Interval absolute value.
    pub fn abs(&self) -> DyadicInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.neg().is_negative() {
            self.neg()
        } else {
            let hi = self.hi.clone().max(self.lo.neg());
            DyadicInterval::new(Dyadic::zero(), hi)
        }
    }

    /// `(1 - self)`, exact.
    pub fn one_minus(&self) -> DyadicInterval {
        let one = Dyadic::from_int(Int::from(1));
        DyadicInterval::new(one.sub(&self.hi), one.sub(&self.lo))
    }

    /// Exact halving.
    pub fn half(&self) -> DyadicInterval {
        DyadicInterval::new(self.lo.half(), self.hi.half())
    }

    pub fn intersects(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_rat(&self, x: &Rat) -> bool {
        self.lo.to_rat() <= *x && *x <= self.hi.to_rat()
    }
}
