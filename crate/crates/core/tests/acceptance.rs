//! Acceptance suite: one test per verification criterion, each printing a
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing items too.

use tmcf::selftest::{run_item, SelftestConfig};

fn run(id: usize) {
    let outcome = run_item(id, &SelftestConfig::default());
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_exact_match() {
    run(1);
}

#[test]
fn criterion_02_oracle_equivalence() {
    run(2);
}

#[test]
fn criterion_03_convergent_criterion() {
    run(3);
}

#[test]
fn criterion_04_structure() {
    run(4);
}

#[test]
fn criterion_05_acceptable_primes() {
    run(5);
}

#[test]
fn criterion_06_witnesses() {
    run(6);
}

#[test]
fn criterion_07_quality_decay() {
    run(7);
}

#[test]
fn criterion_08_constant_identities() {
    run(8);
}

#[test]
fn criterion_09_real_cf_observations() {
    run(9);
}

#[test]
fn criterion_10_contrast_case() {
    run(10);
}

#[test]
fn criterion_11_corollary_scan() {
    run(11);
}
