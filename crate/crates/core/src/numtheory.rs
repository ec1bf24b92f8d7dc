//! Arithmetic modulo prime powers: valuations, primality, primitive roots,
//! Hensel lifting, tower exponentiation and discrete logarithms.
//!
//! Group orders at play factor as `(p-1) * p^{m-1}` for small odd primes, so
//! Pohlig-Hellman with baby-step giant-step subgroup solvers covers every
//! discrete logarithm required here.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{mod_inverse, Int, Poly, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NtError {
    #[error("input must be non-zero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("prime must be odd for multiplicative-structure operations")]
    EvenPrime,
    #[error("primes of 64 bits or more are not supported")]
    Unsupported,
    #[error("base is not coprime to the modulus")]
    NotCoprime,
    #[error("2 is not a primitive root modulo p^2")]
    NotPrimitiveRoot,
    #[error("polynomial has a denominator divisible by p")]
    NonInvertibleDenominator,
    #[error("seed is not a root of the polynomial modulo p")]
    SeedNotRoot,
    #[error("derivative vanishes at the seed modulo p")]
    SingularRoot,
    #[error("no tower exponent solves the congruence")]
    NoSolution,
}

/// A validated prime power `p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePower {
    p: u64,
    m: u32,
    modulus: Int,
}

impl PrimePower {
    /// Validates that `p` is prime (deterministic Miller-Rabin below 2^64;
    /// larger inputs are rejected) and `m >= 1`.
    pub fn new(p: &Int, m: u32) -> Result<Self, NtError> {
        let p_u64 = p.to_u64().ok_or(NtError::Unsupported)?;
        if !is_prime_u64(p_u64) {
            return Err(NtError::NotPrime(p.to_string()));
        }
        assert!(m >= 1, "exponent must be positive");
        Ok(PrimePower {
            p: p_u64,
            m,
            modulus: p.pow(m),
        })
    }

    pub fn from_u64(p: u64, m: u32) -> Result<Self, NtError> {
        Self::new(&Int::from(p), m)
    }

    pub fn prime(&self) -> Int {
        Int::from(self.p)
    }

    pub fn prime_u64(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &Int {
        &self.modulus
    }

    /// `phi(p^m) = (p-1) p^{m-1}` as `u64`; errors out when it does not fit.
    pub fn phi_u64(&self) -> Result<u64, NtError> {
        let phi = (&self.modulus / self.p) * (self.p - 1);
        phi.to_u64().ok_or(NtError::Unsupported)
    }

    /// Same prime, smaller exponent.
    pub fn lower(&self, m: u32) -> PrimePower {
        PrimePower {
            p: self.p,
            m,
            modulus: Int::from(self.p).pow(m),
        }
    }
}

/// Deterministic Miller-Rabin for `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        let mut e = d;
        while e != n - 1 {
            x = mul_mod_u64(x, x, n);
            e <<= 1;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1u64;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, n);
        }
        a = mul_mod_u64(a, a, n);
        e >>= 1;
    }
    acc
}

/// Trial-division factorization; sufficient for the small cofactors that
/// appear as `p - 1` here.
pub fn factorize_u64(mut n: u64) -> Result<Vec<(u64, u32)>, NtError> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut f = 3u64;
    while f.checked_mul(f).is_some_and(|ff| ff <= n) {
        if f > 1_000_000 {
            return Err(NtError::Unsupported);
        }
        let mut e = 0;
        while n.is_multiple_of(f) {
            n /= f;
            e += 1;
        }
        push(f, e);
        f += 2;
    }
    push(n, u32::from(n > 1));
    Ok(out)
}

/// p-adic valuation of a non-zero rational; negative when `p` divides the
/// denominator. `exact_div` flags valuation exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValuationResult {
    pub value: i64,
    pub exact_div: bool,
}

impl ValuationResult {
    fn of(value: i64) -> Self {
        ValuationResult {
            value,
            exact_div: value == 1,
        }
    }
}

pub fn valuation_int(x: &Int, p: &Int) -> Result<ValuationResult, NtError> {
    if x.is_zero() {
        return Err(NtError::ZeroInput);
    }
    let p_u64 = p.to_u64().ok_or(NtError::Unsupported)?;
    if !is_prime_u64(p_u64) {
        return Err(NtError::NotPrime(p.to_string()));
    }
    let mut v = 0i64;
    let mut n = x.abs();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            break;
        }
        v += 1;
        n = q;
    }
    Ok(ValuationResult::of(v))
}

pub fn valuation(x: &Rat, p: &Int) -> Result<ValuationResult, NtError> {
    if x.is_zero() {
        return Err(NtError::ZeroInput);
    }
    let num = valuation_int(x.numer(), p)?;
    let den = valuation_int(x.denom(), p)?;
    Ok(ValuationResult::of(num.value - den.value))
}

/// Whether `g` generates the multiplicative group modulo `p^m`, by checking
/// `g^{phi/l} != 1` for every prime `l` dividing `phi(p^m)`.
pub fn is_primitive_root(g: &Int, pp: &PrimePower) -> Result<bool, NtError> {
    if pp.p == 2 {
        return Err(NtError::EvenPrime);
    }
    if !g.gcd(&pp.prime()).is_one() {
        return Err(NtError::NotCoprime);
    }
    let phi = pp.phi_u64()?;
    let mut primes: Vec<u64> = factorize_u64(pp.p - 1)?.iter().map(|&(q, _)| q).collect();
    if pp.m >= 2 {
        primes.push(pp.p);
    }
    let modulus = pp.modulus();
    for l in primes {
        let e = Int::from(phi / l);
        if g.modpow(&e, modulus).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A Hensel-lifted root together with the side condition that the lift moved
/// away from the seed modulo `p^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HenselRoot {
    pub value: Int,
    pub distinct_mod_p2: bool,
}

/// Unique Newton lift of `seed` to a root of `poly` modulo `p^m`.
///
/// Requires `poly(seed) = 0 (mod p)`, a non-vanishing derivative at the seed
/// and coefficient denominators coprime to `p`.
pub fn hensel_root(poly: &Poly, pp: &PrimePower, seed: &Int) -> Result<HenselRoot, NtError> {
    let (d, coeffs) = poly.integer_coefficients();
    let p = pp.prime();
    if !d.gcd(&p).is_one() {
        return Err(NtError::NonInvertibleDenominator);
    }
    let scaled = Poly::from_coeffs(coeffs.into_iter().map(Rat::from_integer).collect());
    let deriv = scaled.derivative();
    let at = |f: &Poly, x: &Int, modulus: &Int| f.eval_mod(x, modulus).expect("integer poly");

    if !at(&scaled, seed, &p).is_zero() {
        return Err(NtError::SeedNotRoot);
    }
    if at(&deriv, seed, &p).is_zero() {
        return Err(NtError::SingularRoot);
    }

    let modulus = pp.modulus();
    let mut x = seed.mod_floor(modulus);
    for _ in 0..=2 * pp.m {
        let fx = at(&scaled, &x, modulus);
        if fx.is_zero() {
            let p2 = &p * &p;
            let moved = !(&x - seed).mod_floor(&p2).is_zero();
            return Ok(HenselRoot {
                value: x,
                distinct_mod_p2: moved,
            });
        }
        let slope = at(&deriv, &x, modulus);
        let inv = mod_inverse(&slope, modulus).expect("derivative is a unit");
        x = (&x - fx * inv).mod_floor(modulus);
    }
    unreachable!("Newton iteration converges in O(log m) steps");
}

/// `a^{2^n} mod p^m` by `n` successive squarings.
pub fn tower_mod(a: &Int, n: u64, pp: &PrimePower) -> Result<Int, NtError> {
    if !a.gcd(&pp.prime()).is_one() {
        return Err(NtError::NotCoprime);
    }
    let modulus = pp.modulus();
    let mut x = a.mod_floor(modulus);
    for _ in 0..n {
        x = (&x * &x).mod_floor(modulus);
    }
    Ok(x)
}

/// Baby-step giant-step in the cyclic group generated by `g` of order
/// `order` modulo `modulus`; returns `x` with `g^x = h`, if any.
fn bsgs(g: &Int, h: &Int, order: u64, modulus: &Int) -> Option<u64> {
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table: HashMap<Int, u64> = HashMap::with_capacity(m as usize);
    let mut cur = Int::one();
    for j in 0..m {
        table.entry(cur.clone()).or_insert(j);
        cur = (cur * g).mod_floor(modulus);
    }
    // g^{-m}
    let inv_g = mod_inverse(g, modulus)?;
    let factor = inv_g.modpow(&Int::from(m), modulus);
    let mut y = h.mod_floor(modulus);
    for i in 0..=m {
        if let Some(&j) = table.get(&y) {
            return Some((i * m + j) % order.max(1));
        }
        y = (y * &factor).mod_floor(modulus);
    }
    None
}

/// Pohlig-Hellman in the cyclic group `<g>` of order `order` modulo
/// `modulus`; `order_factors` is the factorization of `order`.
fn dlog_cyclic(
    g: &Int,
    h: &Int,
    order: u64,
    order_factors: &[(u64, u32)],
    modulus: &Int,
) -> Option<u64> {
    let mut residues: Vec<(u64, u64)> = Vec::new(); // (x mod q^e, q^e)
    for &(q, e) in order_factors {
        let qe = q.pow(e);
        let g_i = g.modpow(&Int::from(order / qe), modulus);
        let h_i = h.modpow(&Int::from(order / qe), modulus);
        // digits of x base q inside the subgroup of order q^e
        let gamma = g_i.modpow(&Int::from(q.pow(e - 1)), modulus);
        let mut x = 0u64;
        for j in 0..e {
            let g_neg_x = mod_inverse(&g_i, modulus)?.modpow(&Int::from(x), modulus);
            let c = (&h_i * g_neg_x)
                .mod_floor(modulus)
                .modpow(&Int::from(q.pow(e - 1 - j)), modulus);
            let d = bsgs(&gamma, &c, q, modulus)?;
            x += d * q.pow(j);
        }
        residues.push((x, qe));
    }
    // CRT over pairwise-coprime moduli
    let mut x = Int::zero();
    let mut m_all = Int::one();
    for (r, q) in residues {
        let q = Int::from(q);
        let r = Int::from(r);
        let inv = mod_inverse(&m_all, &q)?;
        let t = ((r - &x) * inv).mod_floor(&q);
        x += &m_all * t;
        m_all *= &q;
    }
    let x = x.mod_floor(&Int::from(order.max(1))).to_u64()?;
    // certify
    (g.modpow(&Int::from(x), modulus) == h.mod_floor(modulus)).then_some(x)
}

/// Discrete logarithm base 2 in the full multiplicative group modulo `p^m`.
///
/// Requires 2 to be a primitive root modulo `p^2` (hence modulo every power
/// of `p`); returns the exponent in `[0, phi(p^m))`.
pub fn dlog2(x: &Int, pp: &PrimePower) -> Result<u64, NtError> {
    let two = Int::from(2);
    if !is_primitive_root(&two, &pp.lower(2))? {
        return Err(NtError::NotPrimitiveRoot);
    }
    if !x.gcd(&pp.prime()).is_one() {
        return Err(NtError::NotCoprime);
    }
    let order = pp.phi_u64()?;
    let mut factors = factorize_u64(pp.p - 1)?;
    if pp.m >= 2 {
        factors.push((pp.p, pp.m - 1));
    }
    dlog_cyclic(&two, x, order, &factors, pp.modulus()).ok_or(NtError::NoSolution)
}

/// Multiplicative order of 2 modulo odd `w`, given prime factors of `phi(w)`.
fn order_of_two(w: u64, phi: u64, phi_primes: &[u64]) -> u64 {
    let w_big = Int::from(w);
    let two = Int::from(2);
    let mut ord = phi;
    for &l in phi_primes {
        while ord.is_multiple_of(l) && two.modpow(&Int::from(ord / l), &w_big).is_one() {
            ord /= l;
        }
    }
    ord
}

/// Solves `2^j = c (mod modulus)` for the smallest `j >= j_min`, returning
/// the period of further solutions when the solution set is an arithmetic
/// progression.
///
/// The modulus here is an exponent-group order of the form dividing
/// `(p-1) p^{m-1}`, so its odd part is smooth and the subgroup generated by 2
/// is small enough for Pohlig-Hellman.
pub(crate) fn solve_pow2_congruence(
    c: u64,
    modulus: u64,
    j_min: u64,
) -> Result<(u64, Option<u64>), NtError> {
    if modulus == 1 {
        return Ok((j_min, Some(1)));
    }
    let e2 = modulus.trailing_zeros() as u64;
    let w = modulus >> e2;
    let c = c % modulus;

    // solve modulo the odd part
    let (d, t) = if w == 1 {
        (0u64, 1u64)
    } else {
        let w_factors = factorize_u64(w)?;
        let mut phi = 1u64;
        let mut phi_primes: Vec<u64> = Vec::new();
        for &(q, e) in &w_factors {
            phi *= (q - 1) * q.pow(e - 1);
            for (qq, _) in factorize_u64(q - 1)? {
                if !phi_primes.contains(&qq) {
                    phi_primes.push(qq);
                }
            }
            if e > 1 && !phi_primes.contains(&q) {
                phi_primes.push(q);
            }
        }
        let t = order_of_two(w, phi, &phi_primes);
        let t_factors = factorize_u64(t)?;
        let w_big = Int::from(w);
        let d = dlog_cyclic(&Int::from(2), &Int::from(c % w), t, &t_factors, &w_big)
            .ok_or(NtError::NoSolution)?;
        (d, t)
    };

    if e2 == 0 {
        let j = first_at_least(d, t, j_min);
        return Ok((j, Some(t)));
    }

    let pow2e = 1u64 << e2;
    if c.is_multiple_of(pow2e) {
        // constraint j >= e2; solutions form the progression d mod t above it
        let j = first_at_least(d, t, j_min.max(e2));
        Ok((j, Some(t)))
    } else {
        // 2^j mod 2^{e2} is only c for an isolated j < e2
        for j in j_min..e2 {
            if pow_mod_u64(2, j, modulus) == c {
                return Ok((j, None));
            }
        }
        Err(NtError::NoSolution)
    }
}

fn first_at_least(residue: u64, period: u64, lo: u64) -> u64 {
    if residue >= lo {
        return residue;
    }
    let steps = (lo - residue).div_ceil(period);
    residue + steps * period
}

/// Solution of `2^{2^n} = x (mod p^m)`: the minimal `n >= 1` plus the period
/// with which further solutions repeat.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoubleExpSolution {
    pub n: u64,
    pub period: u64,
}

/// Finds the least `n >= 1` with `tower_mod(2, n, pp) = x`.
///
/// Preconditions: `p || x - 1` (valuation exactly one), 2 a primitive root
/// modulo `p^2`, and `m >= 2`. The two-step reduction runs a discrete
/// logarithm of `x`, then solves for a power of two in the exponent group.
pub fn solve_double_exp(x: &Int, pp: &PrimePower) -> Result<DoubleExpSolution, NtError> {
    assert!(pp.m >= 2, "solve_double_exp requires m >= 2");
    let p = pp.prime();
    let v = valuation_int(&(x - Int::one()), &p)?;
    if !v.exact_div {
        return Err(NtError::NoSolution);
    }
    let k = dlog2(x, pp)?;
    let phi = pp.phi_u64()?;
    let (n, period) = solve_pow2_congruence(k % phi, phi, 1)?;
    let period = period.ok_or(NtError::NoSolution)?;
    Ok(DoubleExpSolution { n, period })
}
