//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one pass/fail line per criterion.

use dtnlab::acceptance;

const SEED: u64 = 42;

fn run(id: usize) {
    let results = acceptance::run_selected(&[id], SEED);
    assert_eq!(results.len(), 1);
    let r = &results[0];
    println!("{}", r.line());
    for d in &r.details {
        println!("    {d}");
    }
    assert!(r.passed, "criterion {id} failed: {:?}", r.details);
}

#[test]
fn criterion_01_bracket_identity() {
    run(1);
}

#[test]
fn criterion_02_forward_direction() {
    run(2);
}

#[test]
fn criterion_03_reverse_direction() {
    run(3);
}

#[test]
fn criterion_04_fejer_riesz_roundtrip() {
    run(4);
}

#[test]
fn criterion_05_classification_loop() {
    run(5);
}

#[test]
fn criterion_06_oracle_corroboration() {
    run(6);
}

#[test]
fn criterion_07_oracle_spectral_cross_validation() {
    run(7);
}

#[test]
fn criterion_08_cylinder() {
    run(8);
}

#[test]
fn criterion_09_obstruction_table() {
    run(9);
}

#[test]
fn criterion_10_flat_disc_identity() {
    run(10);
}

#[test]
fn criterion_11_oval_limit() {
    run(11);
}
