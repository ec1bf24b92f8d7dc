//! The approximation pipeline: scaled integer pairs, certified interval
//! values of the underlying constants, quality measurement, acceptable-prime
//! certificates, prime-power divisibility witnesses, reduction, and the
//! corollary scan.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::canonical::CanonicalSeq;
use crate::dyadic::{Dyadic, DyadicInterval};
use crate::numtheory::{
    dlog2, hensel_root, is_primitive_root, solve_double_exp, tower_mod, valuation, valuation_int,
    NtError, PrimePower, ValuationResult,
};
use crate::poly::{mod_inverse, Int, Poly, Rat};
use crate::tm::{tm_bit, tm_sign};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApproxError {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("estimated size {estimated_bits} bits exceeds the limit of {limit} bits")]
    SizeLimit { estimated_bits: u64, limit: u64 },
    #[error("need at least {required} bits of precision, got {bits}")]
    InsufficientPrecision { bits: u64, required: u64 },
    #[error("({p}, {t}) is not an acceptable prime/index pair")]
    NotAcceptable { p: u64, t: u32 },
    #[error("pair is not divisible by the requested prime power")]
    NotDivisible,
    #[error("no witness index below the search bound; preconditions violated")]
    NoWitness,
    #[error("internal consistency check failed: {0}")]
    SelfCheck(&'static str),
    #[error(transparent)]
    Nt(#[from] NtError),
}

/// Scaled integer approximation pair for given tower index `n`, convergent
/// index `t` and base `a`:
/// `p_int = d_P d_Q * prod_{k=0..n}(a^{2^k}-1) * Phat_t(a^{2^{n+1}})` and
/// `q_int = d_P d_Q * Qhat_t(a^{2^{n+1}})`, where `d_P`, `d_Q` clear the
/// coefficient denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxPair {
    pub n: u32,
    pub t: u32,
    pub a: u64,
    pub p_int: Int,
    pub q_int: Int,
    pub d_p: Int,
    pub d_q: Int,
}

/// Rigorous bracket for `q |q f(a) - p|`.
#[derive(Clone, Debug)]
pub struct QualityReport {
    pub lower: Dyadic,
    pub upper: Dyadic,
    pub bits_used: u64,
    pub tail_terms: u64,
}

/// Certificate that a prime is acceptable at index `t`: 2 is a primitive
/// root modulo `p^2`, `Qhat_t(1)` has p-adic valuation exactly one, and the
/// derivative at 1 is a unit modulo `p`.
#[derive(Clone, Debug)]
pub struct AcceptabilityCertificate {
    pub p: u64,
    pub t: u32,
    pub q1_valuation: ValuationResult,
    pub qprime_nonzero: bool,
    pub primroot: bool,
    /// Indices skipped because a coefficient denominator shares a factor with `p`.
    pub skipped_t: Vec<u32>,
}

/// Divisibility witness: at tower index `n_m`, both scaled integers of the
/// pair are divisible by `p^m` (verified modularly).
#[derive(Clone, Debug)]
pub struct WitnessRecord {
    pub p: u64,
    pub t: u32,
    pub a: u64,
    pub m: u32,
    pub x_m: Int,
    pub n_m: u64,
    pub period: u64,
    pub bound_ok: bool,
    pub q_divisible: bool,
    pub p_divisible: bool,
}

/// One row of the corollary scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub a: u64,
    pub hit: Option<ScanHit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanHit {
    pub p: u64,
    pub n: u32,
    pub t: u32,
}

/// Resource limits for exact big-integer work.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub size_limit_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            size_limit_bits: 10_000_000,
        }
    }
}

/// Pipeline entry point bundling the canonical-convergent memo with limits.
pub struct Engine {
    canon: CanonicalSeq,
    limits: Limits,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            canon: CanonicalSeq::new(),
            limits: Limits::default(),
        }
    }

    pub fn with_parts(canon: CanonicalSeq, limits: Limits) -> Self {
        Engine { canon, limits }
    }

    pub fn canon(&self) -> &CanonicalSeq {
        &self.canon
    }

    /// Exact scaled integers for the pair `(n, t, a)`.
    ///
    /// For `t = 9` and `n <= 2` the construction is cross-checked against the
    /// closed-form recurrence at index `9 * 2^{n+1}` as polynomials.
    pub fn tilde_pair(&self, n: u32, t: u32, a: u64) -> Result<ApproxPair, ApproxError> {
        if a < 2 {
            return Err(ApproxError::InvalidInput("base a must be at least 2"));
        }
        if t < 1 {
            return Err(ApproxError::InvalidInput("index t must be at least 1"));
        }
        let c = self.canon.canonical(t);
        let (d_p, p_coeffs) = c.phat.integer_coefficients();
        let (d_q, q_coeffs) = c.qhat.integer_coefficients();

        // resource guard only; certified arithmetic never touches floats
        let estimated = (d_p.bits() + d_q.bits()) as f64
            + 2.0 * f64::from(t) * (n as f64).exp2() * (a as f64).log2();
        if n > 100 || estimated > self.limits.size_limit_bits as f64 {
            return Err(ApproxError::SizeLimit {
                estimated_bits: if estimated > u64::MAX as f64 {
                    u64::MAX
                } else {
                    estimated.ceil() as u64
                },
                limit: self.limits.size_limit_bits,
            });
        }

        if t == 9 && n <= 2 {
            self.doubling_self_check(n)?;
        }

        let x = Int::from(a).pow(1u32 << (n + 1));
        let q_val = horner_int(&q_coeffs, &x); // d_Q * Qhat_t(x)
        let q_int = &d_p * &q_val;

        let mut product = Int::one();
        let mut power = Int::from(a); // a^{2^k}
        for k in 0..=n {
            product *= &power - Int::one();
            if k < n {
                power = &power * &power;
            }
        }
        let p_val = horner_int(&p_coeffs, &x); // d_P * Phat_t(x)
        let p_int = &d_q * product * p_val;

        if !q_int.is_positive() {
            return Err(ApproxError::SelfCheck("q_int must be positive"));
        }
        Ok(ApproxPair {
            n,
            t,
            a,
            p_int,
            q_int,
            d_p,
            d_q,
        })
    }

    fn doubling_self_check(&self, n: u32) -> Result<(), ApproxError> {
        let c9 = self.canon.canonical(9);
        let mut phat = c9.phat;
        let mut qhat = c9.qhat;
        for _ in 0..=n {
            phat = phat.substitute_square();
            qhat = qhat.substitute_square();
        }
        let mut product = Poly::one();
        for k in 0..=n {
            let factor = &Poly::monomial(Rat::one(), 1 << k) - &Poly::one();
            product = &product * &factor;
        }
        let target = self.canon.canonical(9 << (n + 1));
        if &product * &phat != target.phat || qhat != target.qhat {
            return Err(ApproxError::SelfCheck(
                "pair polynomials disagree with the closed-form recurrence",
            ));
        }
        Ok(())
    }

    /// Rigorous bracket for `q_int |q_int f(a) - p_int|`.
    pub fn quality(&self, pair: &ApproxPair, bits: u64) -> Result<QualityReport, ApproxError> {
        let required = 2 * pair.q_int.bits() + 64;
        if bits < required {
            return Err(ApproxError::InsufficientPrecision { bits, required });
        }
        let (f, tail_terms) = ftmm_value(pair.a, bits);
        let error = f.scale_int(&pair.q_int).sub_int(&pair.p_int).abs();
        let quality = error.scale_int(&pair.q_int);
        // bracket-width invariant: <= 2^{-8} * max(1, lower)
        let bound = quality.lo().clone().max(Dyadic::from_int(Int::one()));
        if quality.width().scale_int(&Int::from(256)) > bound {
            return Err(ApproxError::SelfCheck("quality bracket too wide"));
        }
        Ok(QualityReport {
            lower: quality.lo().clone(),
            upper: quality.hi().clone(),
            bits_used: bits,
            tail_terms,
        })
    }

    /// Checks conditions for a specific pair `(p, t)`; `None` when any fails.
    pub fn acceptable_at(
        &self,
        p: u64,
        t: u32,
    ) -> Result<Option<AcceptabilityCertificate>, ApproxError> {
        let pp2 = PrimePower::from_u64(p, 2)?;
        if !is_primitive_root(&Int::from(2), &pp2)? {
            return Ok(None);
        }
        Ok(self
            .conditions_at(p, t)?
            .map(|q1| AcceptabilityCertificate {
                p,
                t,
                q1_valuation: q1,
                qprime_nonzero: true,
                primroot: true,
                skipped_t: Vec::new(),
            }))
    }

    /// Conditions 3-4 at one index; assumes the primitive-root condition was
    /// already checked. `Err` is impossible for denominators coprime to `p`
    /// (those indices are skipped by the caller).
    fn conditions_at(&self, p: u64, t: u32) -> Result<Option<ValuationResult>, ApproxError> {
        let p_int = Int::from(p);
        let c = self.canon.canonical(t);
        if !c.qhat.denominator_lcm().gcd(&p_int).is_one() {
            return Ok(None);
        }
        let q1 = c.qhat.eval_int(&Int::one());
        if q1.is_zero() {
            return Ok(None);
        }
        let val = valuation(&q1, &p_int)?;
        if val.value != 1 {
            return Ok(None);
        }
        let d1 = c.qhat.derivative().eval_int(&Int::one());
        if d1.is_zero() || valuation(&d1, &p_int)?.value != 0 {
            return Ok(None);
        }
        Ok(Some(val))
    }

    /// Smallest `t <= t_max` making `p` acceptable, or `None`. Indices whose
    /// denominators collide with `p` are reported in `skipped_t`.
    pub fn acceptable(
        &self,
        p: u64,
        t_max: u32,
    ) -> Result<Option<AcceptabilityCertificate>, ApproxError> {
        let pp2 = PrimePower::from_u64(p, 2)?;
        if !is_primitive_root(&Int::from(2), &pp2)? {
            return Ok(None);
        }
        let p_int = Int::from(p);
        let mut skipped = Vec::new();
        for t in 1..=t_max {
            if !self
                .canon
                .canonical(t)
                .qhat
                .denominator_lcm()
                .gcd(&p_int)
                .is_one()
            {
                skipped.push(t);
                continue;
            }
            if let Some(val) = self.conditions_at(p, t)? {
                return Ok(Some(AcceptabilityCertificate {
                    p,
                    t,
                    q1_valuation: val,
                    qprime_nonzero: true,
                    primroot: true,
                    skipped_t: skipped,
                }));
            }
        }
        Ok(None)
    }

    /// Minimal exponent `j >= 1` with `a^{2^j} = x (mod p^m)` plus the period
    /// of further solutions, via discrete logarithms.
    fn min_tower_exponent(
        &self,
        a: u64,
        x: &Int,
        pp: &PrimePower,
    ) -> Result<(u64, u64), ApproxError> {
        if a == 2 {
            let s = solve_double_exp(x, pp)?;
            return Ok((s.n, s.period));
        }
        let phi = pp.phi_u64()?;
        let k_x = dlog2(x, pp)?;
        let k_a = dlog2(&Int::from(a), pp)?;
        // solve k_a * 2^j = k_x (mod phi)
        let g = k_a.gcd(&phi);
        if k_x % g != 0 {
            return Err(ApproxError::NoWitness);
        }
        let m1 = phi / g;
        let inv = mod_inverse(&Int::from(k_a / g), &Int::from(m1.max(1)))
            .ok_or(ApproxError::NoWitness)?
            .to_u64()
            .ok_or(ApproxError::NoWitness)?;
        let c = ((k_x / g) as u128 * inv as u128 % m1.max(1) as u128) as u64;
        let (j, period) = crate::numtheory::solve_pow2_congruence(c, m1, 1)?;
        let period = period.ok_or(ApproxError::NoWitness)?;
        Ok((j, period))
    }

    /// Builds the divisibility witness for `(p, t, a)` at level `m >= 3`:
    /// the Hensel root `x_m` of `Qhat_t` modulo `p^m`, the minimal tower
    /// index `n_m > m` with `a^{2^{n_m+1}} = x_m`, and modular checks that
    /// `p^m` divides both scaled pair integers.
    pub fn witness(&self, p: u64, t: u32, a: u64, m: u32) -> Result<WitnessRecord, ApproxError> {
        if m < 3 {
            return Err(ApproxError::InvalidInput("witness level m must be >= 3"));
        }
        if a < 2 {
            return Err(ApproxError::InvalidInput("base a must be at least 2"));
        }
        if self.acceptable_at(p, t)?.is_none() {
            return Err(ApproxError::NotAcceptable { p, t });
        }
        let pp = PrimePower::from_u64(p, m)?;
        let c = self.canon.canonical(t);
        let root = hensel_root(&c.qhat, &pp, &Int::one())?;
        if !root.distinct_mod_p2 {
            return Err(ApproxError::SelfCheck("Hensel root congruent to 1 mod p^2"));
        }
        let x_m = root.value;

        let (j, period) = self.min_tower_exponent(a, &x_m, &pp)?;
        let mut n_m = j - 1;
        while n_m <= m as u64 {
            n_m += period;
        }

        let bound = if p == 3 {
            Int::from(3).pow(m - 1)
        } else {
            Int::from(m) + Int::from(p - 1) * Int::from(p).pow(m - 2)
        };
        let bound_ok = Int::from(n_m) <= bound;

        let modulus = pp.modulus();
        let x_pow = tower_mod(&Int::from(a), n_m + 1, &pp)?;
        let (_, q_coeffs) = c.qhat.integer_coefficients();
        let q_divisible = horner_mod(&q_coeffs, &x_pow, modulus).is_zero();

        let (_, p_coeffs) = c.phat.integer_coefficients();
        let mut product = horner_mod(&p_coeffs, &x_pow, modulus);
        let mut power = Int::from(a).mod_floor(modulus); // a^{2^k} mod p^m
        for k in 0..=n_m {
            product = (product * (&power - Int::one())).mod_floor(modulus);
            if k < n_m {
                power = (&power * &power).mod_floor(modulus);
            }
        }
        let p_divisible = product.is_zero();

        Ok(WitnessRecord {
            p,
            t,
            a,
            m,
            x_m,
            n_m,
            period,
            bound_ok,
            q_divisible,
            p_divisible,
        })
    }

    /// Divides both integers of the pair by `p^k`, checking divisibility, and
    /// cross-checks that the quality drops by exactly `p^{2k}` (interval
    /// arithmetic, gated by the size limit).
    pub fn reduce(&self, pair: &ApproxPair, p: u64, k: u32) -> Result<ApproxPair, ApproxError> {
        let factor = Int::from(p).pow(k);
        if !(&pair.p_int % &factor).is_zero() || !(&pair.q_int % &factor).is_zero() {
            return Err(ApproxError::NotDivisible);
        }
        let reduced = ApproxPair {
            p_int: &pair.p_int / &factor,
            q_int: &pair.q_int / &factor,
            ..pair.clone()
        };
        let required = 2 * pair.q_int.bits() + 64;
        if k > 0 && required <= self.limits.size_limit_bits {
            let original = self.quality(pair, required)?;
            let shrunk = self.quality(&reduced, required)?;
            let scale = factor.pow(2);
            let lo = shrunk.lower.scale_int(&scale);
            let hi = shrunk.upper.scale_int(&scale);
            if hi < original.lower || original.upper < lo {
                return Err(ApproxError::SelfCheck(
                    "reduced quality does not match the p^{2k} drop",
                ));
            }
        }
        Ok(reduced)
    }

    /// For each `a` in the range, the first `(n, p)` in n-major order with
    /// `p` acceptable and `p || a^{2^n} - 1`.
    pub fn scan(
        &self,
        a_min: u64,
        a_max: u64,
        pool: &[u64],
        t_max: u32,
        n_max: u32,
    ) -> Result<Vec<ScanRow>, ApproxError> {
        if a_min < 2 || a_min > a_max {
            return Err(ApproxError::InvalidInput("need 2 <= a_min <= a_max"));
        }
        let mut accept: HashMap<u64, Option<u32>> = HashMap::new();
        for &p in pool {
            accept.insert(p, self.acceptable(p, t_max)?.map(|c| c.t));
        }
        let rows: Vec<ScanRow> = (a_min..=a_max)
            .into_par_iter()
            .map(|a| {
                let mut power = Int::from(a); // a^{2^n}
                for n in 0..=n_max {
                    for &p in pool {
                        let Some(Some(t)) = accept.get(&p) else {
                            continue;
                        };
                        let x = &power - Int::one();
                        if x.is_zero() {
                            continue;
                        }
                        let val = valuation_int(&x, &Int::from(p)).expect("non-zero");
                        if val.exact_div {
                            return ScanRow {
                                a,
                                hit: Some(ScanHit { p, n, t: *t }),
                            };
                        }
                    }
                    power = &power * &power;
                }
                ScanRow { a, hit: None }
            })
            .collect();
        Ok(rows)
    }
}

fn horner_int(coeffs: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn horner_mod(coeffs: &[Int], x: &Int, modulus: &Int) -> Int {
    let mut acc = Int::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c).mod_floor(modulus);
    }
    acc
}

/// Certified interval of width at most `2^{-bits}` around
/// `f(a) = sum_{i>=0} (-1)^{t_i} a^{-(i+1)}`, together with the number of
/// series terms consumed. The tail after `K` terms is bounded by
/// `a^{-K}/(a-1)`.
pub fn ftmm_value(a: u64, bits: u64) -> (DyadicInterval, u64) {
    assert!(a >= 2, "base must be at least 2");
    let log2_a = 63 - u64::from(a.leading_zeros()); // floor(log2 a) >= 1
    let terms = (bits + 2).div_ceil(log2_a) + 1;
    let a_int = Int::from(a);
    let mut num = Int::zero();
    for i in 0..terms {
        num = num * &a_int + Int::from(tm_sign(i));
    }
    let denom = a_int.pow(terms as u32);
    let sum = Rat::new(num, denom.clone());
    let tail = Rat::new(Int::one(), denom * Int::from(a - 1));
    let interval = DyadicInterval::enclosing(&(&sum - &tail), &(&sum + &tail), bits + 2);
    (interval, terms)
}

/// Certified interval for the Thue-Morse constant `sum t_k 2^{-(k+1)}`,
/// of width at most `2^{-bits}`. The result is checked to intersect
/// `(1 - f(2))/2`.
pub fn tau_tm(bits: u64) -> DyadicInterval {
    let terms = bits + 2;
    let mut num = Int::zero();
    for k in 0..terms {
        num = (num << 1) + Int::from(tm_bit(k));
    }
    let lo = Dyadic::new(num, -(terms as i64));
    let hi = lo.add(&Dyadic::power_of_two(-(terms as i64)));
    let interval = DyadicInterval::new(lo, hi);
    let (f2, _) = ftmm_value(2, bits);
    let via_identity = f2.one_minus().half();
    assert!(
        interval.intersects(&via_identity),
        "defining series and functional identity disagree"
    );
    interval
}

/// Certified interval for `2 * sum_{k>=0} 2^{-2^k}`, the classical contrast
/// constant whose continued fraction uses only the partial quotients 1 and 2.
pub fn doubled_kempner(bits: u64) -> DyadicInterval {
    let mut sum = Dyadic::zero();
    let mut k = 0u32;
    while (1u64 << k) <= bits + 4 {
        sum = sum.add(&Dyadic::power_of_two(1 - (1i64 << k)));
        k += 1;
    }
    let tail = Dyadic::power_of_two(2 - (1i64 << k));
    DyadicInterval::new(sum.clone(), sum.add(&tail))
}
