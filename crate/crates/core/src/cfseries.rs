//! Generic continued-fraction machinery for Laurent tails: partial-quotient
//! extraction, convergent recurrences, canonicalization to monic numerator,
//! and the convergent criterion `deg(Q f - P) < -deg Q`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::laurent::{
    default_residual_window, residual_against, LaurentTail, Residual, ResidualDegree,
};
use crate::poly::{Poly, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CfError {
    #[error("tail must have negative Laurent degree (strip the polynomial part first)")]
    DegreeNotNegative,
    #[error("cannot certify quotient {after} within a scan window of {window} coefficients")]
    PrecisionExhausted { after: usize, window: i64 },
    #[error("cannot canonicalize a pair with zero numerator")]
    ZeroNumerator,
    #[error("pair {at} failed re-verification against the source tail")]
    CertificationFailed { at: usize },
}

/// One convergent `P/Q` together with the leading coefficient of `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub p: Poly,
    pub q: Poly,
    /// Leading coefficient of `p`.
    pub rho: Rat,
    /// Whether `p` is monic.
    pub canonical: bool,
}

impl ConvergentPair {
    pub fn new(p: Poly, q: Poly) -> Self {
        let rho = p.leading_coefficient().cloned().unwrap_or_else(Rat::zero);
        let canonical = p.is_monic();
        ConvergentPair {
            p,
            q,
            rho,
            canonical,
        }
    }
}

/// A verified prefix of a continued-fraction expansion.
#[derive(Clone, Debug)]
pub struct CfPrefix {
    /// Raw partial quotients, not normalized.
    pub quotients: Vec<Poly>,
    /// Convergent pairs built by the standard recurrence.
    pub pairs: Vec<ConvergentPair>,
    /// How many leading pairs passed the convergent criterion.
    pub verified_count: usize,
    /// True when the expansion ended before `count` quotients (rational input).
    pub terminated: bool,
}

/// Scan window used when hunting for the leading coefficient of a remainder
/// tail. Partial quotients of the series handled here have small degree, so
/// a run of this many zero coefficients means the input is not usable.
pub const QUOTIENT_SCAN_WINDOW: i64 = 64;

/// Extracts up to `count` partial quotients of `tail` by repeated
/// "reciprocal, then polynomial part".
///
/// Rational-backed tails run on exact polynomial long division and terminate;
/// other tails are consumed lazily. Every emitted pair is re-verified against
/// the source via the convergent criterion before `verified_count` advances.
pub fn extract_cf(tail: &LaurentTail, count: usize) -> Result<CfPrefix, CfError> {
    let mut quotients: Vec<Poly> = Vec::new();
    let mut pairs: Vec<ConvergentPair> = Vec::new();
    let mut verified = 0usize;
    let mut terminated = false;

    // P_{-1} = 1, Q_{-1} = 0, P_0 = 0, Q_0 = 1
    let mut prev = (Poly::one(), Poly::zero());
    let mut cur = (Poly::zero(), Poly::one());

    let mut step = |a: Poly,
                    quotients: &mut Vec<Poly>,
                    pairs: &mut Vec<ConvergentPair>,
                    verified: &mut usize|
     -> Result<(), CfError> {
        let p_next = &(&a * &cur.0) + &prev.0;
        let q_next = &(&a * &cur.1) + &prev.1;
        prev = std::mem::replace(&mut cur, (p_next.clone(), q_next.clone()));
        quotients.push(a);
        let conv = is_convergent_against(tail, &p_next, &q_next);
        pairs.push(ConvergentPair::new(p_next, q_next));
        if conv.holds && *verified + 1 == pairs.len() {
            *verified += 1;
        } else if !conv.holds {
            return Err(CfError::CertificationFailed { at: pairs.len() });
        }
        Ok(())
    };

    if let Some((num, den)) = tail.rational_form() {
        let mut n = num.clone();
        let mut d = den.clone();
        for _ in 0..count {
            if n.is_zero() {
                terminated = true;
                break;
            }
            let (a, r) = d.div_rem(&n).expect("non-zero divisor");
            step(a, &mut quotients, &mut pairs, &mut verified)?;
            d = std::mem::replace(&mut n, r);
        }
    } else {
        if let Some(h) = tail.first_nonzero(tail.start_index() + QUOTIENT_SCAN_WINDOW) {
            if h < 1 {
                return Err(CfError::DegreeNotNegative);
            }
        }
        let mut g = tail.clone();
        for k in 0..count {
            let inv =
                g.reciprocal(QUOTIENT_SCAN_WINDOW)
                    .map_err(|_| CfError::PrecisionExhausted {
                        after: k,
                        window: QUOTIENT_SCAN_WINDOW,
                    })?;
            let h = -inv.start_index();
            debug_assert!(h >= 1);
            let a = Poly::from_coeffs((0..=h).map(|j| inv.coefficient(-j)).collect());
            step(a, &mut quotients, &mut pairs, &mut verified)?;
            g = inv.view_from(1);
        }
    }

    Ok(CfPrefix {
        quotients,
        pairs,
        verified_count: verified,
        terminated,
    })
}

/// Builds convergent pairs from partial quotients with the seeds
/// `P_0 = 0, Q_0 = 1, P_1 = 1, Q_1 = a_1`.
///
/// Each quotient must have degree at least one.
pub fn pq_recurrence(quotients: &[Poly]) -> Vec<ConvergentPair> {
    let mut prev = (Poly::one(), Poly::zero());
    let mut cur = (Poly::zero(), Poly::one());
    let mut pairs = Vec::with_capacity(quotients.len());
    for a in quotients {
        assert!(
            a.degree() >= Some(1),
            "partial quotients must have degree >= 1"
        );
        let p_next = &(a * &cur.0) + &prev.0;
        let q_next = &(a * &cur.1) + &prev.1;
        prev = std::mem::replace(&mut cur, (p_next.clone(), q_next.clone()));
        pairs.push(ConvergentPair::new(p_next, q_next));
    }
    pairs
}

/// Rescales a pair so that the numerator is monic; the ratio `P/Q` is
/// unchanged.
pub fn canonicalize(pair: &ConvergentPair) -> Result<ConvergentPair, CfError> {
    let rho = pair
        .p
        .leading_coefficient()
        .cloned()
        .ok_or(CfError::ZeroNumerator)?;
    if rho.is_one() {
        return Ok(pair.clone());
    }
    let inv = Rat::one() / rho;
    Ok(ConvergentPair::new(pair.p.scale(&inv), pair.q.scale(&inv)))
}

/// Outcome of the convergent criterion, with the residual degree report.
#[derive(Clone, Debug)]
pub struct Convergence {
    pub holds: bool,
    pub residual: Residual,
}

/// Checks `deg(Q f - P) < -deg Q` against the Thue-Morse tail.
pub fn is_convergent(p: &Poly, q: &Poly) -> Convergence {
    is_convergent_against(&LaurentTail::thue_morse(), p, q)
}

/// Checks the convergent criterion against an arbitrary tail.
pub fn is_convergent_against(tail: &LaurentTail, p: &Poly, q: &Poly) -> Convergence {
    assert!(!q.is_zero(), "denominator must be non-zero");
    let qdeg = q.degree().unwrap() as i64;
    let window = default_residual_window(q);
    let residual = residual_against(tail, p, q, window);
    let holds = match &residual.degree {
        ResidualDegree::Exact { degree, .. } => *degree < -qdeg,
        // all coefficients through the window vanish and the window clears
        // -deg Q, so the criterion holds without over-claiming a degree
        ResidualDegree::Below { through } => *through >= qdeg,
    };
    Convergence { holds, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Int;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn tm() -> LaurentTail {
        LaurentTail::thue_morse()
    }

    #[test]
    fn first_quotient_gives_printed_pair() {
        let cf = extract_cf(&tm(), 1).unwrap();
        assert_eq!(cf.verified_count, 1);
        let pair = canonicalize(&cf.pairs[0]).unwrap();
        assert_eq!(pair.p, Poly::one());
        assert_eq!(pair.q, p("z+1"));
    }

    #[test]
    fn third_pair_matches_printed_convergent() {
        let cf = extract_cf(&tm(), 3).unwrap();
        assert_eq!(cf.verified_count, 3);
        let pair = canonicalize(&cf.pairs[2]).unwrap();
        assert_eq!(pair.p, p("z^2-2"));
        assert_eq!(pair.q, p("z^3+z^2"));
    }

    #[test]
    fn rational_tail_terminates_with_exact_cf() {
        let tail = LaurentTail::from_rational(p("z^2-2"), p("z^3+z^2")).unwrap();
        let cf = extract_cf(&tail, 10).unwrap();
        assert!(cf.terminated);
        assert_eq!(cf.quotients.len(), 3);
        assert_eq!(cf.verified_count, 3);
        let last = canonicalize(cf.pairs.last().unwrap()).unwrap();
        assert_eq!(last.p, p("z^2-2"));
        assert_eq!(last.q, p("z^3+z^2"));
    }

    #[test]
    fn pq_recurrence_seed_cases() {
        let pairs = pq_recurrence(&[p("z")]);
        assert_eq!((pairs[0].p.clone(), pairs[0].q.clone()), (p("1"), p("z")));
        let pairs = pq_recurrence(&[p("z+1"), p("z-1")]);
        assert_eq!(pairs[1].q, p("z^2"));
    }

    #[test]
    fn stream_and_euclid_routes_agree_on_a_companion_series() {
        // signs of the Thue-Morse sequence on exponents 3^k, truncated after
        // 3^7: the lazy reciprocal chain and polynomial long division must
        // produce identical quotients (the fourth has degree three)
        let exponents: Vec<i64> = (0..8u64).map(|j| 3i64.pow(j as u32)).collect();
        let signs: Vec<i64> = (0..8u64).map(|j| i64::from(crate::tm::tm_sign(j))).collect();

        let stream = {
            let (exponents, signs) = (exponents.clone(), signs.clone());
            LaurentTail::from_fn(1, move |k| {
                match exponents.iter().position(|&e| e == k) {
                    Some(i) => Rat::from_integer(Int::from(signs[i])),
                    None => Rat::zero(),
                }
            })
        };

        let top = 3i64.pow(7);
        let mut num = Poly::zero();
        for (e, s) in exponents.iter().zip(&signs) {
            num = &num + &Poly::monomial(Rat::from_integer(Int::from(*s)), (top - e) as usize);
        }
        let den = Poly::monomial(Rat::one(), top as usize);
        let rational = LaurentTail::from_rational(num, den).unwrap();

        let via_stream = extract_cf(&stream, 6).unwrap();
        let via_euclid = extract_cf(&rational, 6).unwrap();
        assert_eq!(via_stream.verified_count, 6);
        assert_eq!(via_stream.quotients, via_euclid.quotients);
        assert_eq!(via_stream.quotients[3].degree(), Some(3));
    }

    #[test]
    fn deep_zero_runs_exhaust_the_scan_window() {
        // 1/z followed by silence: after the first quotient the remainder
        // cannot be told apart from zero within the scan window
        let tail = LaurentTail::from_fn(1, |k| {
            if k == 1 {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let err = extract_cf(&tail, 3).unwrap_err();
        assert!(matches!(err, CfError::PrecisionExhausted { after: 1, .. }));
    }

    #[test]
    fn positive_degree_tails_are_rejected() {
        let tail = LaurentTail::from_fn(-1, |_| Rat::one());
        assert_eq!(extract_cf(&tail, 2).unwrap_err(), CfError::DegreeNotNegative);
    }

    #[test]
    fn canonicalize_reference_cases() {
        let raw = ConvergentPair::new(p("-z^2+2"), p("-z^3-z^2"));
        let c = canonicalize(&raw).unwrap();
        assert_eq!((c.p.clone(), c.q.clone()), (p("z^2-2"), p("z^3+z^2")));
        assert!(c.canonical);
        assert_eq!(canonicalize(&c).unwrap(), c);

        let raw = ConvergentPair::new(p("2*z-2"), p("2*z^2+2"));
        let c = canonicalize(&raw).unwrap();
        assert_eq!((c.p, c.q), (p("z-1"), p("z^2+1")));

        let zero = ConvergentPair::new(Poly::zero(), Poly::one());
        assert_eq!(canonicalize(&zero).unwrap_err(), CfError::ZeroNumerator);
    }

    #[test]
    fn convergent_criterion_reference_cases() {
        let phat9 = p("z^8-3*z^6+2*z^4+3*z^2-4");
        let qhat9 = p("z^9+z^8-z^7-z^6+z^3+z^2+2*z+2");
        let conv = is_convergent(&phat9, &qhat9);
        assert!(conv.holds);
        assert_eq!(
            conv.residual.degree,
            ResidualDegree::Exact {
                degree: -10,
                leading: Rat::from_integer(Int::from(6)),
            }
        );

        let conv = is_convergent(&Poly::one(), &p("z"));
        assert!(!conv.holds);
        assert_eq!(
            conv.residual.degree,
            ResidualDegree::Exact {
                degree: -1,
                leading: Rat::from_integer(Int::from(-1)),
            }
        );

        assert!(is_convergent(&p("z^5-z^4-2*z+2"), &p("z^6+z^4")).holds);
    }

    #[test]
    fn cross_products_of_consecutive_pairs_are_constant() {
        let cf = extract_cf(&tm(), 10).unwrap();
        for w in cf.pairs.windows(2) {
            let cross = &(&w[1].p * &w[0].q) - &(&w[0].p * &w[1].q);
            assert_eq!(cross.degree(), Some(0), "cross product must be constant");
        }
    }

    proptest! {
        #[test]
        fn criterion_is_scale_invariant(num in -20i64..20, den in 1i64..20, n in 1usize..8) {
            prop_assume!(num != 0);
            let scale = Rat::new(Int::from(num), Int::from(den));
            let cf = extract_cf(&tm(), n).unwrap();
            let pair = &cf.pairs[n - 1];
            let a = is_convergent(&pair.p, &pair.q);
            let b = is_convergent(&pair.p.scale(&scale), &pair.q.scale(&scale));
            prop_assert_eq!(a.holds, b.holds);
        }
    }
}
