//! Lazy Laurent tails: memoized coefficient streams for series of the form
//! `sum_{k >= h} c_k z^{-k}`.
//!
//! Streams are pull-based: consumers ask for coefficients through some index
//! and the stream computes exactly as much as needed. All sources are exact,
//! so re-reading an index always returns the same value. The Laurent degree
//! convention is `deg = -h'` where `h'` is the smallest index with a non-zero
//! coefficient.

use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{Poly, Rat};
use crate::tm::tm_sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("no non-zero coefficient found through index {through}")]
    NoPivot { through: i64 },
    #[error("rational tail requires deg(num) < deg(den) and den != 0")]
    NotAProperFraction,
}

enum Source {
    /// Direct formula per index.
    Formula(Box<dyn Fn(i64) -> Rat + Send + Sync>),
    /// Expansion of `num/den` with `deg num < deg den`, by long division.
    Rational { num: Poly, den: Poly },
    /// Reciprocal of a tail whose first non-zero coefficient sits at `pivot`.
    Reciprocal { of: LaurentTail, pivot: i64 },
    /// `q(z) * tail - p(z)`.
    Linear { q: Poly, p: Poly, of: LaurentTail },
}

struct Inner {
    base: i64,
    source: Source,
    cache: RwLock<Vec<Rat>>,
}

/// A lazily evaluated Laurent tail, cheap to clone and shareable across
/// threads. Cloning produces a view onto the same memoized stream.
#[derive(Clone)]
pub struct LaurentTail {
    start: i64,
    inner: Arc<Inner>,
}

impl std::fmt::Debug for LaurentTail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LaurentTail(start {})", self.start)
    }
}

impl LaurentTail {
    fn new(base: i64, source: Source) -> Self {
        LaurentTail {
            start: base,
            inner: Arc::new(Inner {
                base,
                source,
                cache: RwLock::new(Vec::new()),
            }),
        }
    }

    /// The Thue-Morse tail `sum_{i>=0} (-1)^{t_i} z^{-(i+1)}`.
    pub fn thue_morse() -> Self {
        LaurentTail::from_fn(1, |k| Rat::from_integer(tm_sign((k - 1) as u64).into()))
    }

    /// Tail with coefficients given by an exact formula, starting at `start`.
    ///
    /// The formula must be deterministic; it is consulted once per index and
    /// the result is memoized.
    pub fn from_fn(start: i64, f: impl Fn(i64) -> Rat + Send + Sync + 'static) -> Self {
        LaurentTail::new(start, Source::Formula(Box::new(f)))
    }

    /// Tail of the rational function `num/den`; requires `deg num < deg den`.
    pub fn from_rational(num: Poly, den: Poly) -> Result<Self, LaurentError> {
        if den.is_zero() || num.degree() >= den.degree() {
            return Err(LaurentError::NotAProperFraction);
        }
        Ok(LaurentTail::new(1, Source::Rational { num, den }))
    }

    /// The rational function behind this tail, when it was built from one
    /// and has not been re-indexed.
    pub fn rational_form(&self) -> Option<(&Poly, &Poly)> {
        match &self.inner.source {
            Source::Rational { num, den } if self.start == self.inner.base => Some((num, den)),
            _ => None,
        }
    }

    /// `q(z) * self - p(z)` as a lazy tail.
    pub fn linear_combination(&self, q: &Poly, p: &Poly) -> LaurentTail {
        let mut base = i64::MAX;
        if let Some(qd) = q.degree() {
            base = base.min(self.start - qd as i64);
        }
        if let Some(pd) = p.degree() {
            base = base.min(-(pd as i64));
        }
        if base == i64::MAX {
            base = self.start;
        }
        LaurentTail::new(
            base,
            Source::Linear {
                q: q.clone(),
                p: p.clone(),
                of: self.clone(),
            },
        )
    }

    /// Multiplicative inverse `1/self`, scanning for the leading coefficient
    /// through `start + scan` indices. The result starts at index `-pivot`,
    /// so its polynomial part occupies indices `-pivot..=0`.
    pub fn reciprocal(&self, scan: i64) -> Result<LaurentTail, LaurentError> {
        let pivot = self
            .first_nonzero(self.start + scan)
            .ok_or(LaurentError::NoPivot {
                through: self.start + scan,
            })?;
        Ok(LaurentTail::new(
            -pivot,
            Source::Reciprocal {
                of: self.clone(),
                pivot,
            },
        ))
    }

    /// A view of the same stream dropping all coefficients below `start`.
    pub fn view_from(&self, start: i64) -> LaurentTail {
        LaurentTail {
            start: start.max(self.inner.base),
            inner: Arc::clone(&self.inner),
        }
    }

    pub fn start_index(&self) -> i64 {
        self.start
    }

    /// Coefficient of `z^{-k}`; zero below the view's start index.
    pub fn coefficient(&self, k: i64) -> Rat {
        if k < self.start {
            return Rat::zero();
        }
        self.ensure_through(k);
        let cache = self.inner.cache.read().unwrap();
        cache[(k - self.inner.base) as usize].clone()
    }

    /// Smallest index in `start..=through` with a non-zero coefficient.
    pub fn first_nonzero(&self, through: i64) -> Option<i64> {
        (self.start..=through).find(|&k| !self.coefficient(k).is_zero())
    }

    /// Laurent degree determined by scanning through index `through`:
    /// `Some(-h')` if a non-zero coefficient exists there, `None` otherwise.
    pub fn degree_within(&self, through: i64) -> Option<i64> {
        self.first_nonzero(through).map(|h| -h)
    }

    fn ensure_through(&self, k: i64) {
        let need = (k - self.inner.base + 1).max(0) as usize;
        if self.inner.cache.read().unwrap().len() >= need {
            return;
        }
        let mut cache = self.inner.cache.write().unwrap();
        while cache.len() < need {
            let idx = self.inner.base + cache.len() as i64;
            let value = self.compute(idx, &cache);
            cache.push(value);
        }
    }

    fn compute(&self, idx: i64, done: &[Rat]) -> Rat {
        match &self.inner.source {
            Source::Formula(f) => f(idx),
            Source::Rational { num, den } => {
                // den = sum D_i z^i with deg d; matching coefficients in
                // num = den * sum c_k z^{-k} at power d - m gives a solvable
                // triangular system for c_m.
                let d = den.degree().unwrap() as i64;
                let lead = den.leading_coefficient().unwrap();
                let m = idx; // m >= 1
                let mut acc = if d - m >= 0 {
                    num.coefficient((d - m) as usize)
                } else {
                    Rat::zero()
                };
                for (t, c) in done.iter().enumerate() {
                    let k = self.inner.base + t as i64; // index of known coefficient
                    let pow = d - m + k;
                    if (0..=d).contains(&pow) {
                        acc -= den.coefficient(pow as usize) * c;
                    }
                }
                acc / lead
            }
            Source::Reciprocal { of, pivot } => {
                let lead = of.coefficient(*pivot);
                if done.is_empty() {
                    return Rat::one() / lead;
                }
                // convolution of `of` against already-known inverse coefficients
                let mut acc = Rat::zero();
                for (t, r) in done.iter().enumerate() {
                    let shift = done.len() - t; // >= 1
                    acc += of.coefficient(pivot + shift as i64) * r;
                }
                -acc / lead
            }
            Source::Linear { q, p, of } => {
                let mut acc = Rat::zero();
                if let Some(qd) = q.degree() {
                    for j in 0..=qd {
                        let c = q.coefficient(j);
                        if !c.is_zero() {
                            acc += c * of.coefficient(idx + j as i64);
                        }
                    }
                }
                if idx <= 0 {
                    acc -= p.coefficient((-idx) as usize);
                }
                acc
            }
        }
    }
}

/// Degree report for a residual series computed through a finite index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidualDegree {
    /// First non-zero coefficient found: degree is `-index`.
    Exact { degree: i64, leading: Rat },
    /// All coefficients through the requested index vanish; the degree is
    /// below `-through`.
    Below { through: i64 },
}

/// Coefficients of `q(z) * tail - p(z)` through a chosen index, plus the
/// honestly reported degree.
#[derive(Clone, Debug)]
pub struct Residual {
    pub from: i64,
    pub through: i64,
    pub coeffs: Vec<Rat>,
    pub degree: ResidualDegree,
}

impl Residual {
    pub fn coefficient(&self, k: i64) -> Rat {
        if k < self.from || k > self.through {
            return Rat::zero();
        }
        self.coeffs[(k - self.from) as usize].clone()
    }
}

/// Residual of `(p, q)` against the Thue-Morse tail: `q(z)*f(z) - p(z)`
/// computed through `z^{-through}` by finite convolution.
pub fn residual(p: &Poly, q: &Poly, through: i64) -> Residual {
    residual_against(&LaurentTail::thue_morse(), p, q, through)
}

/// Residual against an arbitrary tail.
pub fn residual_against(tail: &LaurentTail, p: &Poly, q: &Poly, through: i64) -> Residual {
    let series = tail.linear_combination(q, p);
    let from = series.start_index().min(through);
    let coeffs: Vec<Rat> = (from..=through).map(|k| series.coefficient(k)).collect();
    let degree = match coeffs.iter().position(|c| !c.is_zero()) {
        Some(i) => ResidualDegree::Exact {
            degree: -(from + i as i64),
            leading: coeffs[i].clone(),
        },
        None => ResidualDegree::Below { through },
    };
    Residual {
        from,
        through,
        coeffs,
        degree,
    }
}

/// Default convolution window for certifying the convergent criterion.
pub fn default_residual_window(q: &Poly) -> i64 {
    2 * q.degree().unwrap_or(0) as i64 + 16
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Int;
    use num_traits::ToPrimitive;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn thue_morse_stream_is_plus_minus_one() {
        let tm = LaurentTail::thue_morse();
        assert_eq!(tm.start_index(), 1);
        for k in 1..=2000 {
            let c = tm.coefficient(k);
            assert!(c.is_one() || (-&c).is_one(), "coefficient {k} not unit");
        }
        // deterministic re-reads
        assert_eq!(tm.coefficient(137), tm.coefficient(137));
        assert_eq!(tm.degree_within(10), Some(-1));
    }

    #[test]
    fn residual_of_first_convergent() {
        // (z+1)*f - 1 starts with -2 z^{-2}
        let r = residual(&Poly::one(), &p("z+1"), 10);
        assert_eq!(
            r.degree,
            ResidualDegree::Exact {
                degree: -2,
                leading: Rat::from_integer(Int::from(-2)),
            }
        );
    }

    #[test]
    fn residual_of_non_convergent() {
        // z*f - 1 has degree -1 = -deg(z), so 1/z fails the criterion
        let r = residual(&Poly::one(), &p("z"), 10);
        assert_eq!(
            r.degree,
            ResidualDegree::Exact {
                degree: -1,
                leading: Rat::from_integer(Int::from(-1)),
            }
        );
    }

    #[test]
    fn residual_reports_below_when_all_zero() {
        // residual of the tail against itself: q = 1, p = 0 gives the plain
        // stream; pick p matching the first coefficients so everything
        // computed vanishes
        let tail = LaurentTail::from_rational(Poly::one(), p("z")).unwrap();
        let r = residual_against(&tail, &Poly::zero(), &p("z"), 6);
        // z * (1/z) - 0 = 1 at index 0: degree 0
        assert_eq!(
            r.degree,
            ResidualDegree::Exact {
                degree: 0,
                leading: Rat::one(),
            }
        );
        let exact = residual_against(&tail, &Poly::one(), &p("z"), 6);
        assert_eq!(exact.degree, ResidualDegree::Below { through: 6 });
    }

    #[test]
    fn rational_expansion_matches_long_division() {
        // 1/(z-1) = z^{-1} + z^{-2} + ...
        let t = LaurentTail::from_rational(Poly::one(), p("z-1")).unwrap();
        for k in 1..=20 {
            assert!(t.coefficient(k).is_one());
        }
        // (z^2-2)/(z^3+z^2): check against schoolbook coefficients
        let t = LaurentTail::from_rational(p("z^2-2"), p("z^3+z^2")).unwrap();
        let got: Vec<i64> = (1..=8)
            .map(|k| t.coefficient(k).to_integer().to_i64().unwrap())
            .collect();
        // schoolbook long division: z^{-1} - z^{-2} - z^{-3} + z^{-4} - z^{-5} + ...
        assert_eq!(got, vec![1i64, -1, -1, 1, -1, 1, -1, 1]);
    }

    #[test]
    fn reciprocal_inverts_streams() {
        let tm = LaurentTail::thue_morse();
        let inv = tm.reciprocal(16).unwrap();
        assert_eq!(inv.start_index(), -1);
        // check tm * inv = 1 through several coefficients via convolution
        for m in -1..=12i64 {
            let mut acc = Rat::zero();
            for k in 1..=(m + 2) {
                acc += tm.coefficient(k) * inv.coefficient(m - k);
            }
            let expect = if m == 0 { Rat::one() } else { Rat::zero() };
            assert_eq!(acc, expect, "convolution at index {m}");
        }
    }

    #[test]
    fn reciprocal_needs_a_pivot() {
        let zero = LaurentTail::new(1, Source::Formula(Box::new(|_| Rat::zero())));
        assert_eq!(
            zero.reciprocal(8).unwrap_err(),
            LaurentError::NoPivot { through: 9 }
        );
    }

    #[test]
    fn views_hide_low_coefficients() {
        let tm = LaurentTail::thue_morse();
        let v = tm.view_from(3);
        assert!(v.coefficient(2).is_zero());
        assert_eq!(v.coefficient(3), tm.coefficient(3));
    }
}
