//! The acceptance checklist: one item per verification stage, runnable from
//! `cargo test` (integration suite) and from the CLI `selftest` subcommand.
//!
//! Every tolerance is pinned here. Items build their own engines so that a
//! corrupted beta table (the fault-injection hook) propagates everywhere.

use std::time::Instant;

use num_traits::{One, Zero};

use crate::approx::{doubled_kempner, ftmm_value, tau_tm, ApproxError, Engine, Limits};
use crate::canonical::{double, structure_report, BetaTable, CanonicalSeq};
use crate::cfseries::{canonicalize, extract_cf, is_convergent};
use crate::laurent::{LaurentTail, ResidualDegree};
use crate::numtheory::{is_primitive_root, PrimePower};
use crate::poly::{Int, Poly, Rat};
use crate::realcf::real_cf;

/// Expected canonical convergents, written in the polynomial text grammar.
pub mod reference {
    pub const PHAT_5: &str = "z^4-z^2-1";
    pub const QHAT_5: &str = "z^5+z^4+z^3+z^2+z+1";
    pub const PHAT_6: &str = "z^5-z^4-2*z+2";
    pub const QHAT_6: &str = "z^6+z^4";
    pub const PHAT_7: &str = "z^6-2*z^4-z^2+3";
    pub const QHAT_7: &str = "z^7+z^6-z^3-z^2-z-1";
    pub const PHAT_9: &str = "z^8-3*z^6+2*z^4+3*z^2-4";
    pub const QHAT_9: &str = "z^9+z^8-z^7-z^6+z^3+z^2+2*z+2";
    pub const QHAT_11: &str =
        "z^11+z^10+2/3*z^9+2/3*z^8+4/3*z^7+4/3*z^6+z^5+z^4+2/3*z^3+2/3*z^2+1/3*z+1/3";
}

/// Configuration for a selftest run.
#[derive(Clone, Debug)]
pub struct SelftestConfig {
    /// `None` lets each item pick the precision its checks require;
    /// a forced value is used as-is and may legitimately fail items.
    pub precision_bits: Option<u64>,
    /// Plants a wrong beta value to exercise the failure paths.
    pub corrupt_beta: bool,
    pub t_max: u32,
    pub n_max: u32,
    pub size_limit_bits: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            precision_bits: None,
            corrupt_beta: false,
            t_max: 64,
            n_max: 8,
            size_limit_bits: 10_000_000,
        }
    }
}

impl SelftestConfig {
    fn engine(&self) -> Engine {
        let beta = BetaTable::new();
        if self.corrupt_beta {
            beta.inject(10, Rat::from_integer(Int::from(7)));
        }
        Engine::with_parts(
            CanonicalSeq::with_beta(beta),
            Limits {
                size_limit_bits: self.size_limit_bits,
            },
        )
    }

    fn bits(&self, required: u64) -> u64 {
        self.precision_bits.unwrap_or(required)
    }
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {:<24} {} ({} ms) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.millis,
            self.detail
        )
    }
}

pub const CRITERIA: [(usize, &str); 11] = [
    (1, "exact-match"),
    (2, "oracle-equivalence"),
    (3, "convergent-criterion"),
    (4, "structure"),
    (5, "acceptable-primes"),
    (6, "witnesses"),
    (7, "quality-decay"),
    (8, "constant-identities"),
    (9, "real-cf-observations"),
    (10, "contrast-case"),
    (11, "corollary-scan"),
];

type ItemResult = Result<String, String>;

pub fn run_item(id: usize, cfg: &SelftestConfig) -> CriterionOutcome {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown");
    let start = Instant::now();
    let result = match id {
        1 => item_exact_match(cfg),
        2 => item_oracle_equivalence(cfg),
        3 => item_convergent_criterion(cfg),
        4 => item_structure(cfg),
        5 => item_acceptable_primes(cfg),
        6 => item_witnesses(cfg),
        7 => item_quality_decay(cfg),
        8 => item_constant_identities(cfg),
        9 => item_real_cf_observations(cfg),
        10 => item_contrast_case(cfg),
        11 => item_corollary_scan(cfg),
        _ => Err(format!("no criterion with id {id}")),
    };
    let millis = start.elapsed().as_millis();
    match result {
        Ok(detail) => CriterionOutcome {
            id,
            name,
            passed: true,
            detail,
            millis,
        },
        Err(detail) => CriterionOutcome {
            id,
            name,
            passed: false,
            detail,
            millis,
        },
    }
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|(id, _)| run_item(*id, cfg)).collect()
}

fn parse(text: &str) -> Poly {
    text.parse().expect("reference polynomial text")
}

fn check(ok: bool, msg: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

/// Criterion 1: the closed-form recurrence reproduces the printed convergents exactly.
fn item_exact_match(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    let cases = [
        (5u32, reference::PHAT_5, reference::QHAT_5),
        (6, reference::PHAT_6, reference::QHAT_6),
        (7, reference::PHAT_7, reference::QHAT_7),
        (9, reference::PHAT_9, reference::QHAT_9),
    ];
    for (n, p, q) in cases {
        let c = engine.canon().canonical(n);
        check(
            c.phat == parse(p),
            &format!("numerator mismatch at n = {n}"),
        )?;
        check(
            c.qhat == parse(q),
            &format!("denominator mismatch at n = {n}"),
        )?;
    }
    let c11 = engine.canon().canonical(11);
    check(
        c11.qhat == parse(reference::QHAT_11),
        "denominator mismatch at n = 11",
    )?;
    Ok("canonical 5, 6, 7, 9, 11 equal the printed polynomials".into())
}

/// Criterion 2: the generic stream engine agrees with the closed form up to index 60,
/// including the beta values implied by raw leading coefficients.
fn item_oracle_equivalence(cfg: &SelftestConfig) -> ItemResult {
    const DEPTH: u32 = 60;
    let engine = cfg.engine();
    let cf = extract_cf(&LaurentTail::thue_morse(), DEPTH as usize)
        .map_err(|e| format!("extraction failed: {e}"))?;
    check(
        cf.verified_count == DEPTH as usize,
        &format!("only {} of {DEPTH} pairs verified", cf.verified_count),
    )?;
    for n in 1..=DEPTH {
        let got = canonicalize(&cf.pairs[n as usize - 1]).map_err(|e| e.to_string())?;
        let want = engine.canon().canonical(n);
        check(
            got.p == want.phat && got.q == want.qhat,
            &format!("engine and closed form disagree at n = {n}"),
        )?;
    }
    for k in 3..=DEPTH {
        let implied = &cf.pairs[k as usize - 3].rho / &cf.pairs[k as usize - 1].rho;
        check(
            implied == engine.canon().beta(k),
            &format!("beta mismatch at k = {k}"),
        )?;
    }
    Ok(format!(
        "stream engine matches closed form and beta table through n = {DEPTH}"
    ))
}

/// Criterion 3: convergent criterion with residual degrees, and the exact leading
/// residual behaviour at n = 9.
fn item_convergent_criterion(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    for n in 1..=40u32 {
        let c = engine.canon().canonical(n);
        let conv = is_convergent(&c.phat, &c.qhat);
        check(conv.holds, &format!("criterion fails at n = {n}"))?;
        match conv.residual.degree {
            ResidualDegree::Exact { degree, .. } => check(
                degree <= -(n as i64 + 1),
                &format!("residual degree {degree} too high at n = {n}"),
            )?,
            ResidualDegree::Below { .. } => {}
        }
    }
    // at n = 9: residual Q f - P = 6 z^{-10} + ..., so the normalized
    // difference f - P/Q starts with exactly 6 z^{-19}
    let c9 = engine.canon().canonical(9);
    let conv = is_convergent(&c9.phat, &c9.qhat);
    let (deg, lead) = match conv.residual.degree {
        ResidualDegree::Exact { degree, leading } => (degree, leading),
        ResidualDegree::Below { .. } => return Err("no residual degree at n = 9".into()),
    };
    check(
        deg == -10 && lead == Rat::from_integer(Int::from(6)),
        &format!("residual at n = 9 is {lead}*z^{deg}, want 6*z^-10"),
    )?;
    let qlead = c9.qhat.leading_coefficient().cloned().unwrap();
    let diff_deg = deg - c9.qhat.degree().unwrap() as i64;
    let diff_lead = lead / qlead;
    check(
        diff_deg == -19 && diff_lead == Rat::from_integer(Int::from(6)),
        &format!("difference series starts {diff_lead}*z^{diff_deg}, want 6*z^-19"),
    )?;
    Ok("criterion holds for n <= 40; n = 9 difference series starts with 6*z^-19".into())
}

/// Criterion 4: shape checks and the doubling map.
fn item_structure(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    for n in 2..=30u32 {
        structure_report(engine.canon(), n).map_err(|e| e.to_string())?;
    }
    for n in 2..=20u32 {
        let c = engine.canon().canonical(n);
        let doubled = double(&c.as_pair()).map_err(|e| e.to_string())?;
        let target = engine.canon().canonical(2 * n);
        check(
            doubled.p == target.phat && doubled.q == target.qhat,
            &format!("doubled pair differs from canonical at 2n = {}", 2 * n),
        )?;
    }
    Ok("structure reports pass for n <= 30; doubling matches for n <= 20".into())
}

/// Criterion 5: acceptable primes, printed indices, and the two non-acceptable primes.
fn item_acceptable_primes(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    let c3 = engine
        .acceptable(3, 16)
        .map_err(|e| e.to_string())?
        .ok_or("3 not found acceptable")?;
    check(
        c3.t == 9,
        &format!("acceptable(3) found t = {}, want 9", c3.t),
    )?;
    let q9 = engine.canon().canonical(9).qhat;
    check(
        q9.eval_int(&Int::one()) == Rat::from_integer(Int::from(6)),
        "Qhat_9(1) != 6",
    )?;
    check(
        q9.derivative().eval_int(&Int::one()) == Rat::from_integer(Int::from(11)),
        "Qhat_9'(1) != 11",
    )?;
    let c5 = engine
        .acceptable(5, 16)
        .map_err(|e| e.to_string())?
        .ok_or("5 not found acceptable")?;
    check(
        c5.t == 11,
        &format!("acceptable(5) found t = {}, want 11", c5.t),
    )?;

    for (p, t_printed) in [(29u64, 35u32), (11, 43), (61, 49), (19, 19), (13, 33)] {
        let cert = engine
            .acceptable(p, cfg.t_max.max(t_printed))
            .map_err(|e| e.to_string())?
            .ok_or(format!("{p} not found acceptable"))?;
        check(
            cert.t <= t_printed,
            &format!("minimal t = {} for p = {p} exceeds {t_printed}", cert.t),
        )?;
        check(
            engine
                .acceptable_at(p, t_printed)
                .map_err(|e| e.to_string())?
                .is_some(),
            &format!("printed index t = {t_printed} fails for p = {p}"),
        )?;
    }

    for p in [7u64, 113] {
        let pp2 = PrimePower::from_u64(p, 2).map_err(|e| e.to_string())?;
        check(
            !is_primitive_root(&Int::from(2), &pp2).map_err(|e| e.to_string())?,
            &format!("2 must not be a primitive root mod {p}^2"),
        )?;
    }
    Ok("3 -> t=9, 5 -> t=11; 29/11/61/19/13 certified within printed indices".into())
}

/// Criterion 6: divisibility witnesses for p = 3, t = 9, a = 2, levels 3..=10.
fn item_witnesses(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    let mut detail = String::new();
    for m in 3..=10u32 {
        let w = engine.witness(3, 9, 2, m).map_err(|e| e.to_string())?;
        check(
            w.n_m > m as u64,
            &format!("witness index {} not above m = {m}", w.n_m),
        )?;
        check(
            Int::from(w.n_m) <= Int::from(3).pow(m - 1),
            &format!("witness index {} above 3^{}", w.n_m, m - 1),
        )?;
        check(w.bound_ok, &format!("bound flag false at m = {m}"))?;
        check(
            w.q_divisible,
            &format!("3^{m} does not divide the scaled q"),
        )?;
        check(
            w.p_divisible,
            &format!("3^{m} does not divide the scaled p"),
        )?;
        if m == 3 {
            check(w.n_m == 7, &format!("n_3 = {}, want 7", w.n_m))?;
            detail = format!("n_3 = {}, x_3 = {}", w.n_m, w.x_m);
        }
    }
    Ok(format!("witnesses verified for m = 3..=10; {detail}"))
}

/// Criterion 7: quality stays in (0, 25] along the tower, and the m = 3 reduction
/// divides it by more than 700.
fn item_quality_decay(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    let cap = Rat::from_integer(Int::from(25));
    for n in 0..=8u32 {
        let pair = engine.tilde_pair(n, 9, 2).map_err(|e| e.to_string())?;
        let bits = cfg.bits(2 * pair.q_int.bits() + 64);
        let q = engine.quality(&pair, bits).map_err(|e| e.to_string())?;
        check(
            q.lower.to_rat() > Rat::zero(),
            &format!("quality not positive at n = {n}"),
        )?;
        check(
            q.upper.to_rat() <= cap,
            &format!("quality above 25 at n = {n}"),
        )?;
    }
    let w = engine.witness(3, 9, 2, 3).map_err(|e| e.to_string())?;
    let pair = engine
        .tilde_pair(w.n_m as u32, 9, 2)
        .map_err(|e| e.to_string())?;
    let reduced = engine.reduce(&pair, 3, 3).map_err(|e| e.to_string())?;
    let bits = cfg.bits((2 * pair.q_int.bits() + 64).max(6000));
    let q_orig = engine.quality(&pair, bits).map_err(|e| e.to_string())?;
    let q_red = engine.quality(&reduced, bits).map_err(|e| e.to_string())?;
    check(
        q_red.upper.scale_int(&Int::from(700)) < q_orig.lower,
        "reduced quality does not drop by a factor of 700",
    )?;
    // monotone decay at higher witness levels, as far as exact evaluation
    // stays within the size limit
    let mut levels = Vec::new();
    for m in 4..=6u32 {
        let w = engine.witness(3, 9, 2, m).map_err(|e| e.to_string())?;
        let big = match engine.tilde_pair(w.n_m as u32, 9, 2) {
            Ok(pair) => pair,
            Err(ApproxError::SizeLimit { .. }) => break,
            Err(e) => return Err(e.to_string()),
        };
        let shrunk = engine.reduce(&big, 3, m).map_err(|e| e.to_string())?;
        let level_bits = cfg.bits(2 * big.q_int.bits() + 64);
        let q_level = engine
            .quality(&shrunk, level_bits)
            .map_err(|e| e.to_string())?;
        check(
            q_level.upper.scale_int(&Int::from(700)) < q_orig.lower,
            &format!("reduced quality at m = {m} not below the m = 3 baseline / 700"),
        )?;
        levels.push(m);
    }
    Ok(format!(
        "qualities in (0, 25] for n <= 8; reduction by 27 drops quality by >700 at {bits} bits; \
         decay also verified at m = {levels:?}"
    ))
}

/// Criterion 8: the defining series for tau and the functional identity agree at
/// three precisions.
fn item_constant_identities(cfg: &SelftestConfig) -> ItemResult {
    for bits in [64u64, 1024, 8192] {
        let bits = cfg.bits(bits);
        let tau = tau_tm(bits);
        let (f2, _) = ftmm_value(2, bits);
        let identity = f2.one_minus().half();
        check(
            tau.intersects(&identity),
            &format!("identity fails at {bits} bits"),
        )?;
    }
    Ok("tau and (1 - f(2))/2 intersect at 64, 1024 and 8192 bits".into())
}

/// Criterion 9: observations on the certified expansion of tau: frequent 4s and 5s, a
/// large quotient, and (softly) an occurrence of 2569.
fn item_real_cf_observations(cfg: &SelftestConfig) -> ItemResult {
    let bits = cfg.bits(24_000);
    let tau = tau_tm(bits);
    let cf = real_cf(&tau, 1001);
    let partials = cf.partial_quotients();
    check(
        partials.len() >= 1000,
        &format!("only {} certified partial quotients", partials.len()),
    )?;
    let partials = &partials[..1000];
    let small = partials
        .iter()
        .filter(|a| **a == Int::from(4) || **a == Int::from(5))
        .count();
    check(
        small >= 5,
        &format!("only {small} quotients equal to 4 or 5"),
    )?;
    let biggest = partials.iter().max().cloned().unwrap_or_else(Int::zero);
    check(
        biggest > Int::from(50),
        &format!("largest quotient {biggest} does not exceed 50"),
    )?;
    let hits_2569 = partials.iter().filter(|a| **a == Int::from(2569)).count();
    if hits_2569 > 0 {
        return Ok(format!(
            "{small} quotients in {{4,5}}, max {biggest}, 2569 occurs {hits_2569} times"
        ));
    }
    // 2569 recurs infinitely often but no position is guaranteed; report the
    // observed multiset of large values instead of hard-failing, and look for
    // the value in the expansion of f(2) itself, where it shows up early at
    // roughly doubling positions
    let mut big: Vec<&Int> = partials.iter().filter(|a| **a > Int::from(50)).collect();
    big.sort();
    big.dedup();
    let listed: Vec<String> = big.iter().map(|a| a.to_string()).collect();
    let (f2, _) = ftmm_value(2, bits);
    let f2_positions: Vec<String> = real_cf(&f2, 1001)
        .quotients
        .iter()
        .enumerate()
        .filter(|(_, a)| **a == Int::from(2569))
        .map(|(i, _)| i.to_string())
        .collect();
    Ok(format!(
        "{small} quotients in {{4,5}}, max {biggest}; 2569 not in tau's first 1000 \
         (large values: {}); in f(2) it sits at positions {}",
        listed.join(", "),
        f2_positions.join(", ")
    ))
}

/// Criterion 10: the contrast constant `2 sum 2^{-2^k}` certifies 200 quotients, all 1
/// or 2.
fn item_contrast_case(cfg: &SelftestConfig) -> ItemResult {
    let bits = cfg.bits(2000);
    let v = doubled_kempner(bits);
    let cf = real_cf(&v, 200);
    check(
        cf.quotients.len() == 200,
        &format!("only {} certified quotients", cf.quotients.len()),
    )?;
    for a in &cf.quotients {
        check(
            a.is_one() || *a == Int::from(2),
            &format!("quotient {a} outside {{1, 2}}"),
        )?;
    }
    Ok("200 certified quotients, all in {1, 2}".into())
}

/// Criterion 11: the corollary scan over 2..=104 with the printed prime pool.
fn item_corollary_scan(cfg: &SelftestConfig) -> ItemResult {
    let engine = cfg.engine();
    let pool = [3u64, 5, 11, 13, 19, 29, 61];
    let rows = engine
        .scan(2, 104, &pool, cfg.t_max, cfg.n_max)
        .map_err(|e| e.to_string())?;
    let mut missing = Vec::new();
    for row in &rows {
        if row.a % 15 != 0 && row.hit.is_none() {
            missing.push(row.a);
        }
    }
    check(
        missing.is_empty(),
        &format!(
            "no certificate for a in {missing:?} (each not divisible by 15); \
             for these bases every pool prime p has an odd factor in the order \
             of a mod p or p-adic valuation of a^(2^n)-1 at least 2 for all n"
        ),
    )?;
    for (a, p) in [(30u64, 29u64), (45, 11), (60, 61), (75, 19), (90, 13)] {
        let row = rows.iter().find(|r| r.a == a).unwrap();
        let hit = row
            .hit
            .clone()
            .ok_or(format!("no certificate for a = {a}"))?;
        check(
            hit.p == p,
            &format!("a = {a} certified by {} instead of {p}", hit.p),
        )?;
    }
    let row15 = rows.iter().find(|r| r.a == 15).unwrap();
    check(row15.hit.is_none(), "a = 15 unexpectedly got a certificate")?;
    let certified = rows.iter().filter(|r| r.hit.is_some()).count();
    Ok(format!("{certified} of {} bases certified", rows.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_beta_fails_structure_items() {
        let cfg = SelftestConfig {
            corrupt_beta: true,
            ..Default::default()
        };
        assert!(!run_item(1, &cfg).passed);
        assert!(!run_item(4, &cfg).passed);
    }

    #[test]
    fn forced_low_precision_fails_quality_items() {
        let cfg = SelftestConfig {
            precision_bits: Some(64),
            ..Default::default()
        };
        let outcome = run_item(7, &cfg);
        assert!(!outcome.passed);
        assert!(outcome.detail.contains("precision"), "{}", outcome.detail);
    }
}
