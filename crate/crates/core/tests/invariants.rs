//! Cross-module invariants re-verified through independent routes.

use num_traits::{One, Zero};

use tmcf::approx::{ftmm_value, tau_tm, Engine};
use tmcf::canonical::double;
use tmcf::cfseries::is_convergent;
use tmcf::numtheory::{valuation_int, PrimePower};
use tmcf::poly::Rat;
use tmcf::Int;

#[test]
fn scan_rows_replay_under_direct_big_integer_arithmetic() {
    let engine = Engine::new();
    let pool = [3u64, 5, 11, 13, 19, 29, 61];
    let rows = engine.scan(2, 104, &pool, 64, 8).unwrap();
    for row in rows.iter().filter_map(|r| r.hit.clone().map(|h| (r.a, h))) {
        let (a, hit) = row;
        let power = Int::from(a).pow(1u32 << hit.n);
        let val = valuation_int(&(power - Int::one()), &Int::from(hit.p)).unwrap();
        assert_eq!(val.value, 1, "a = {a}");
        assert!(val.exact_div);
        // the certifying index must satisfy the acceptability conditions
        assert!(engine.acceptable_at(hit.p, hit.t).unwrap().is_some());
    }
}

#[test]
fn witness_roots_replay_under_plain_modpow() {
    let engine = Engine::new();
    for m in 3..=6u32 {
        let w = engine.witness(3, 9, 2, m).unwrap();
        let pp = PrimePower::from_u64(3, m).unwrap();
        let modulus = pp.modulus();
        // 2^{2^{n_m+1}} mod 3^m computed by exponent reduction instead of
        // repeated squaring: 2^e with e = 2^{n_m+1} mod phi(3^m)
        let phi = Int::from(pp.phi_u64().unwrap());
        let e = Int::from(2).modpow(&Int::from(w.n_m + 1), &phi);
        let x = Int::from(2).modpow(&e, modulus);
        assert_eq!(x, w.x_m, "m = {m}");
        // the Hensel root annihilates the denominator-cleared polynomial
        let q = engine.canon().canonical(9).qhat;
        assert!(q.eval_mod(&w.x_m, modulus).unwrap().is_zero());
    }
}

#[test]
fn doubling_outputs_satisfy_the_convergent_criterion() {
    let engine = Engine::new();
    for n in 1..=10u32 {
        let pair = engine.canon().canonical(n).as_pair();
        let doubled = double(&pair).unwrap();
        assert!(is_convergent(&doubled.p, &doubled.q).holds, "n = {n}");
        let redoubled = double(&doubled).unwrap();
        assert!(is_convergent(&redoubled.p, &redoubled.q).holds, "n = {n}");
    }
}

#[test]
fn pair_integers_replay_under_rational_evaluation() {
    let engine = Engine::new();
    for (n, t, a) in [(0u32, 11u32, 2u64), (1, 11, 3), (2, 9, 2)] {
        let pair = engine.tilde_pair(n, t, a).unwrap();
        let c = engine.canon().canonical(t);
        let x = Rat::from_integer(Int::from(a).pow(1u32 << (n + 1)));
        let mut product = Rat::one();
        let mut power = Rat::from_integer(Int::from(a));
        for k in 0..=n {
            product *= &power - Rat::one();
            if k < n {
                power = &power * &power;
            }
        }
        let d_p = Rat::from_integer(pair.d_p.clone());
        let d_q = Rat::from_integer(pair.d_q.clone());
        let expect_p = &d_p * &d_q * product * c.phat.eval(&x);
        let expect_q = &d_p * &d_q * c.qhat.eval(&x);
        assert_eq!(Rat::from_integer(pair.p_int), expect_p);
        assert_eq!(Rat::from_integer(pair.q_int), expect_q);
    }
}

#[test]
fn series_identity_holds_at_odd_precisions() {
    for bits in [33u64, 100, 333, 2049] {
        let tau = tau_tm(bits);
        let identity = ftmm_value(2, bits).0.one_minus().half();
        assert!(tau.intersects(&identity), "bits = {bits}");
    }
}

#[test]
fn memoized_tables_are_safe_under_concurrent_readers() {
    // the beta table and the convergent memo follow a single-writer-append,
    // many-reader contract; hammer them from several threads and check the
    // results agree with a fresh sequential engine
    let engine = std::sync::Arc::new(Engine::new());
    let handles: Vec<_> = (0..8)
        .map(|i| {
            let engine = std::sync::Arc::clone(&engine);
            std::thread::spawn(move || {
                let n = 30 + (i % 4) * 10;
                (n, engine.canon().canonical(n).qhat, engine.canon().beta(n))
            })
        })
        .collect();
    let fresh = Engine::new();
    for handle in handles {
        let (n, qhat, beta) = handle.join().unwrap();
        assert_eq!(qhat, fresh.canon().canonical(n).qhat);
        assert_eq!(beta, fresh.canon().beta(n));
    }
}
