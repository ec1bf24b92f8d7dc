//! Certified continued fractions of real numbers given by dyadic intervals.
//!
//! The Gauss map runs simultaneously on both interval endpoints with exact
//! rational arithmetic; a partial quotient is emitted only while both
//! endpoints agree on it, so every emitted quotient is certified.

use num_traits::Zero;

use crate::dyadic::DyadicInterval;
use crate::poly::{Int, Rat};

/// Certified prefix of a continued fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealCf {
    /// `[a_0; a_1, a_2, ...]` as far as certification reached.
    pub quotients: Vec<Int>,
    pub requested: usize,
    /// True when the endpoints disagreed before `requested` quotients were
    /// produced; truncation is reported, never thrown.
    pub exhausted: bool,
}

impl RealCf {
    /// Quotients after the integer part.
    pub fn partial_quotients(&self) -> &[Int] {
        &self.quotients[1.min(self.quotients.len())..]
    }
}

/// Runs the interval Gauss map on `x`, emitting at most `max_terms`
/// certified quotients.
pub fn real_cf(x: &DyadicInterval, max_terms: usize) -> RealCf {
    let mut lo = x.lo().to_rat();
    let mut hi = x.hi().to_rat();
    let mut quotients = Vec::new();
    let mut exhausted = false;
    while quotients.len() < max_terms {
        let a_lo = lo.floor().to_integer();
        let a_hi = hi.floor().to_integer();
        if a_lo != a_hi {
            exhausted = true;
            break;
        }
        quotients.push(a_lo.clone());
        let a = Rat::from_integer(a_lo);
        let frac_lo = lo - &a;
        let frac_hi = hi - &a;
        if frac_lo.is_zero() && frac_hi.is_zero() {
            // the interval collapsed onto an exact rational; its expansion ends
            break;
        }
        if frac_lo.is_zero() || frac_hi.is_zero() {
            exhausted = true;
            break;
        }
        // reciprocal reverses the endpoints
        lo = frac_hi.recip();
        hi = frac_lo.recip();
    }
    RealCf {
        quotients,
        requested: max_terms,
        exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{doubled_kempner, tau_tm};
    use crate::dyadic::Dyadic;
    use num_traits::One;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn tau_expansion_begins_as_expected() {
        let tau = tau_tm(4000);
        let cf = real_cf(&tau, 6);
        assert_eq!(cf.quotients, ints(&[0, 2, 2, 2, 1, 4]));
        assert!(!cf.exhausted);
    }

    #[test]
    fn wide_intervals_certify_almost_nothing() {
        // width 0.3 around 0.41: integer part is certain, nothing else
        let iv = DyadicInterval::new(
            Dyadic::new(Int::from(26), -7), // 0.203
            Dyadic::new(Int::from(64), -7), // 0.5
        );
        let cf = real_cf(&iv, 10);
        assert_eq!(cf.quotients, ints(&[0]));
        assert!(cf.exhausted);
    }

    #[test]
    fn exact_rational_interval_terminates() {
        let iv = DyadicInterval::new(
            Dyadic::from_rat_floor(&Rat::new(Int::from(7), Int::from(3)), 64),
            Dyadic::from_rat_ceil(&Rat::new(Int::from(7), Int::from(3)), 64),
        );
        // 7/3 is not dyadic, so floor/ceil at 64 bits straddle it; only the
        // integer part is certain (1/(x-2) brackets 3 from both sides)
        let cf = real_cf(&iv, 3);
        assert_eq!(cf.quotients, vec![Int::from(2)]);
        assert!(cf.exhausted);
    }

    #[test]
    fn point_dyadic_interval_ends_cleanly() {
        // 13/8 = [1; 1, 1, 2, 2] as a point interval
        let iv = DyadicInterval::point(Dyadic::new(Int::from(13), -3));
        let cf = real_cf(&iv, 20);
        assert!(!cf.exhausted);
        // reconstruct the value from the quotients
        let mut value = Rat::from_integer(cf.quotients.last().unwrap().clone());
        for a in cf.quotients.iter().rev().skip(1) {
            value = Rat::from_integer(a.clone()) + value.recip();
        }
        assert_eq!(value, Rat::new(Int::from(13), Int::from(8)));
    }

    #[test]
    fn contrast_constant_has_only_ones_and_twos() {
        let v = doubled_kempner(2000);
        let cf = real_cf(&v, 200);
        assert_eq!(cf.quotients.len(), 200);
        for a in &cf.quotients {
            assert!(a.is_one() || *a == Int::from(2), "unexpected quotient {a}");
        }
    }
}
