use std::io::Write;

use mlpit::selftest::{run_criterion, SelftestConfig};

const SEED: u64 = 1;

fn gate(id: usize) {
    let report = run_criterion(&SelftestConfig::full(SEED), id);
    let line = format!("{report}\n");
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    assert!(report.passed, "{line}");
}

#[test]
fn ac01_depth3_hitting_completeness() {
    gate(1);
}

#[test]
fn ac02_depth4_hitting_completeness() {
    gate(2);
}

#[test]
fn ac03_regular_hitting_completeness() {
    gate(3);
}

#[test]
fn ac04_reduction_soundness() {
    gate(4);
}

#[test]
fn ac05_roabp_correctness() {
    gate(5);
}

#[test]
fn ac06_hash_verifier_equivalence() {
    gate(6);
}

#[test]
fn ac07_simple_form() {
    gate(7);
}

#[test]
fn ac08_lift_and_product_counting() {
    gate(8);
}

#[test]
fn ac09_lower_bound_extractor() {
    gate(9);
}

#[test]
fn ac10_parameter_arithmetic() {
    gate(10);
}
