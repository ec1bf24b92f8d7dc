//! Dense univariate polynomials over exact rationals.
//!
//! Coefficients are stored from degree 0 upward; the zero polynomial has an
//! empty coefficient vector and degree `None`. The text grammar used by the
//! CLI and the test suite writes terms as `c*z^k` joined by `+`/`-`, with `c`
//! an integer or `num/den`, `z^1` written `z` and `z^0` omitted, e.g.
//! `z^8-3*z^6+2*z^4+3*z^2-4`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact arbitrary-precision rational.
pub type Rat = BigRational;
/// Exact arbitrary-precision integer.
pub type Int = BigInt;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("coefficient denominator is not invertible modulo the given prime power")]
    NonInvertibleDenominator,
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid polynomial text at byte {at}: {reason}")]
pub struct ParsePolyError {
    pub at: usize,
    pub reason: &'static str,
}

/// Dense univariate polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    // coefficient of z^i at index i; the last entry is non-zero unless empty
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// Builds a polynomial from coefficients indexed by power of `z`,
    /// trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Convenience constructor from small integer coefficients (degree 0 upward).
    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rat::from_integer(Int::from(c)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` standing in for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficient(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coefficients(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coefficient().is_some_and(One::is_one)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: &Int) -> Rat {
        self.eval(&Rat::from_integer(x.clone()))
    }

    /// Evaluates modulo `modulus`, replacing coefficient denominators by
    /// modular inverses. Fails if some denominator shares a factor with the
    /// modulus.
    pub fn eval_mod(&self, x: &Int, modulus: &Int) -> Result<Int, PolyError> {
        let x = x.mod_floor(modulus);
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            let den_inv =
                mod_inverse(c.denom(), modulus).ok_or(PolyError::NonInvertibleDenominator)?;
            let term = (c.numer() * den_inv).mod_floor(modulus);
            acc = (acc * &x + term).mod_floor(modulus);
        }
        Ok(acc)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rat::from_integer(Int::from(k)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// Returns `P(z^2)`.
    pub fn substitute_square(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); 2 * self.coeffs.len() - 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * k] = c.clone();
        }
        Poly { coeffs }
    }

    /// Returns `P(-z)`.
    pub fn substitute_negate(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c })
            .collect();
        Poly { coeffs }
    }

    /// Positive lcm of all coefficient denominators; 1 for the zero polynomial.
    pub fn denominator_lcm(&self) -> Int {
        let mut l = Int::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        l.abs()
    }

    /// Returns `(d, coeffs)` where `d` is the denominator lcm and `coeffs`
    /// are the integer coefficients of `d * P`.
    pub fn integer_coefficients(&self) -> (Int, Vec<Int>) {
        let d = self.denominator_lcm();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&d / c.denom()))
            .collect();
        (d, coeffs)
    }

    /// If the polynomial uses only even powers, returns `E` with `E(z^2) = P(z)`.
    pub fn even_part(&self) -> Option<Poly> {
        if self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::from_coeffs(
            self.coeffs.iter().step_by(2).cloned().collect(),
        ))
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), PolyError> {
        let dd = d.degree().ok_or(PolyError::DivisionByZero)?;
        let lead = d.leading_coefficient().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = &rem[k] / lead;
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    let idx = k - dd + i;
                    rem[idx] = &rem[idx] - &(dc * &c);
                }
            }
            quo[k - dd] = c;
            rem.pop();
        }
        Ok((Poly::from_coeffs(quo), Poly::from_coeffs(rem)))
    }

    /// Exact division; `None` when the remainder is non-zero.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d).ok()?;
        r.is_zero().then_some(q)
    }
}

pub(crate) fn mod_inverse(a: &Int, modulus: &Int) -> Option<Int> {
    let a = a.mod_floor(modulus);
    let g = a.extended_gcd(modulus);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(modulus))
    } else {
        None
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coefficient(k) + rhs.coefficient(k))
            .collect();
        Poly::from_coeffs(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coefficient(k) - rhs.coefficient(k))
            .collect();
        Poly::from_coeffs(coeffs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let mag = c.abs();
            if k == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                if k == 1 {
                    write!(f, "z")?;
                } else {
                    write!(f, "z^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b == b' ' || b == b'\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
    }

    fn err(&self, reason: &'static str) -> ParsePolyError {
        ParsePolyError {
            at: self.pos,
            reason,
        }
    }
}

impl FromStr for Poly {
    type Err = ParsePolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let mut terms: Vec<(usize, Rat)> = Vec::new();
        cur.skip_ws();
        let mut negative = if cur.eat(b'-') {
            true
        } else {
            cur.eat(b'+');
            false
        };
        loop {
            cur.skip_ws();
            let mut coeff: Option<Rat> = None;
            if let Some(num) = cur.digits() {
                let num: Int = num.parse().unwrap();
                let den: Int = if cur.eat(b'/') {
                    cur.digits()
                        .ok_or_else(|| cur.err("expected denominator digits"))?
                        .parse()
                        .unwrap()
                } else {
                    Int::one()
                };
                if den.is_zero() {
                    return Err(cur.err("zero denominator"));
                }
                coeff = Some(Rat::new(num, den));
                cur.skip_ws();
                if cur.eat(b'*') {
                    cur.skip_ws();
                }
            }
            let power = if cur.eat(b'z') {
                if cur.eat(b'^') {
                    let exp = cur.digits().ok_or_else(|| cur.err("expected exponent"))?;
                    exp.parse::<usize>()
                        .map_err(|_| cur.err("exponent out of range"))?
                } else {
                    1
                }
            } else {
                0
            };
            let coeff = match coeff {
                Some(c) => c,
                None if power > 0 => Rat::one(),
                None => return Err(cur.err("expected coefficient or z")),
            };
            terms.push((power, if negative { -coeff } else { coeff }));
            cur.skip_ws();
            negative = if cur.eat(b'+') {
                false
            } else if cur.eat(b'-') {
                true
            } else {
                break;
            };
        }
        cur.skip_ws();
        if cur.pos != cur.bytes.len() {
            return Err(cur.err("trailing characters"));
        }
        let max_pow = terms.iter().map(|&(k, _)| k).max().unwrap_or(0);
        let mut coeffs = vec![Rat::zero(); max_pow + 1];
        for (k, c) in terms {
            coeffs[k] = &coeffs[k] + &c;
        }
        Ok(Poly::from_coeffs(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn parse_and_display_round_trip_on_reference_text() {
        for text in [
            "z^8-3*z^6+2*z^4+3*z^2-4",
            "z^9+z^8-z^7-z^6+z^3+z^2+2*z+2",
            "z^11+z^10+2/3*z^9+2/3*z^8+4/3*z^7+4/3*z^6+z^5+z^4+2/3*z^3+2/3*z^2+1/3*z+1/3",
            "-z+1",
            "0",
            "7",
            "z",
        ] {
            assert_eq!(p(text).to_string(), text);
        }
    }

    #[test]
    fn parse_is_tolerant_to_spaces_and_plus_prefix() {
        assert_eq!(p(" + z^2 - 2 "), p("z^2-2"));
        assert_eq!(p("3 * z + 1/2"), p("3*z+1/2"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("z^".parse::<Poly>().is_err());
        assert!("1/0".parse::<Poly>().is_err());
        assert!("z+*".parse::<Poly>().is_err());
        assert!("".parse::<Poly>().is_err());
        assert!("2x".parse::<Poly>().is_err());
    }

    #[test]
    fn degree_of_zero_is_none() {
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(p("0").degree(), None);
        assert_eq!(p("5").degree(), Some(0));
        assert_eq!(p("z^3+z^2").degree(), Some(3));
    }

    #[test]
    fn eval_reference_values() {
        // printed ninth pair
        let phat9 = p("z^8-3*z^6+2*z^4+3*z^2-4");
        let qhat9 = p("z^9+z^8-z^7-z^6+z^3+z^2+2*z+2");
        assert_eq!(qhat9.eval_int(&Int::from(1)), rat(6, 1));
        assert_eq!(phat9.eval_int(&Int::from(4)), rat(53804, 1));
        assert_eq!(Poly::zero().eval(&rat(17, 3)), Rat::zero());
    }

    #[test]
    fn derivative_reference_values() {
        let qhat9 = p("z^9+z^8-z^7-z^6+z^3+z^2+2*z+2");
        assert_eq!(qhat9.derivative().eval_int(&Int::from(1)), rat(11, 1));
        assert_eq!(p("42").derivative(), Poly::zero());
        // printed eleventh denominator: derivative value at 1 is 187/3,
        // whose 5-adic valuation is 0
        let qhat11 =
            p("z^11+z^10+2/3*z^9+2/3*z^8+4/3*z^7+4/3*z^6+z^5+z^4+2/3*z^3+2/3*z^2+1/3*z+1/3");
        let v = qhat11.derivative().eval_int(&Int::from(1));
        assert_eq!(v, rat(187, 3));
    }

    #[test]
    fn eval_mod_reference_values() {
        let qhat11 =
            p("z^11+z^10+2/3*z^9+2/3*z^8+4/3*z^7+4/3*z^6+z^5+z^4+2/3*z^3+2/3*z^2+1/3*z+1/3");
        // summing the printed coefficients gives 10, and 10 = 0 mod 5
        assert_eq!(
            qhat11.eval_mod(&Int::from(1), &Int::from(5)),
            Ok(Int::zero())
        );
        // denominator 3 is not invertible mod 3
        assert_eq!(
            qhat11.eval_mod(&Int::from(0), &Int::from(3)),
            Err(PolyError::NonInvertibleDenominator)
        );
        let qhat9 = p("z^9+z^8-z^7-z^6+z^3+z^2+2*z+2");
        assert_eq!(
            qhat9.eval_mod(&Int::from(16), &Int::from(27)),
            Ok(Int::zero())
        );
        // oracle for the previous assert: 16 is the only root of Q_9 mod 27
        // congruent to 1 mod 3
        let roots: Vec<i64> = (0..27)
            .filter(|&x| x % 3 == 1)
            .filter(|&x| {
                qhat9
                    .eval_mod(&Int::from(x), &Int::from(27))
                    .unwrap()
                    .is_zero()
            })
            .collect();
        assert_eq!(roots, vec![16]);
    }

    #[test]
    fn substitute_reference_values() {
        assert_eq!(p("z^2+1").substitute_square(), p("z^4+1"));
        assert_eq!(p("z+1").substitute_negate(), p("-z+1"));
        let qhat5 = p("z^5+z^4+z^3+z^2+z+1");
        assert_eq!(qhat5.substitute_square(), p("z^10+z^8+z^6+z^4+z^2+1"));
    }

    #[test]
    fn denominator_lcm_reference_values() {
        assert_eq!(
            p("z^9+z^8-z^7-z^6+z^3+z^2+2*z+2").denominator_lcm(),
            Int::one()
        );
        let qhat11 =
            p("z^11+z^10+2/3*z^9+2/3*z^8+4/3*z^7+4/3*z^6+z^5+z^4+2/3*z^3+2/3*z^2+1/3*z+1/3");
        assert_eq!(qhat11.denominator_lcm(), Int::from(3));
        assert_eq!(Poly::zero().denominator_lcm(), Int::one());
    }

    #[test]
    fn div_rem_exact_cases() {
        let q = p("z^3+z^2");
        let quot = q.div_exact(&p("z+1")).unwrap();
        assert_eq!(quot, p("z^2"));
        assert_eq!(p("z^2+1").div_exact(&p("z+1")), None);
        assert!(p("z").div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn even_part_extraction() {
        assert_eq!(p("z^4+z^2+1").even_part(), Some(p("z^2+z+1")));
        assert_eq!(p("z^3+1").even_part(), None);
        assert_eq!(Poly::zero().even_part(), Some(Poly::zero()));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-9i64..10, 1i64..5), 0..8)
            .prop_map(|cs| Poly::from_coeffs(cs.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(a in arb_poly()) {
            let text = a.to_string();
            prop_assert_eq!(text.parse::<Poly>().unwrap(), a);
        }

        #[test]
        fn negate_is_an_involution(a in arb_poly()) {
            prop_assert_eq!(a.substitute_negate().substitute_negate(), a.clone());
            prop_assert_eq!(a.substitute_negate().degree(), a.degree());
        }

        #[test]
        fn square_substitution_doubles_degree(a in arb_poly()) {
            prop_assert_eq!(a.substitute_square().degree(), a.degree().map(|d| 2 * d));
        }

        #[test]
        fn denominator_lcm_clears_denominators(a in arb_poly()) {
            let (d, coeffs) = a.integer_coefficients();
            prop_assert!(d > Int::zero());
            let scaled = a.scale(&Rat::from_integer(d.clone()));
            for (k, c) in coeffs.iter().enumerate() {
                prop_assert!(scaled.coefficient(k).is_integer());
                prop_assert_eq!(scaled.coefficient(k).numer().clone(), c.clone());
            }
            let back = scaled.scale(&Rat::new(Int::one(), d));
            prop_assert_eq!(back, a);
        }

        #[test]
        fn div_rem_reconstructs(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            if let Some(rd) = r.degree() {
                prop_assert!(rd < b.degree().unwrap());
            }
        }
    }
}
