//! The acceptance criteria, one test each. Every test writes a single
//! PASS/FAIL line straight to stderr so the lines survive output capture.

use std::io::Write;
use std::time::Duration;

use littlewood_cli::suite::{run_suite, CriterionOutcome, SuiteOptions, CRITERIA};

fn criterion(id: u8, limit: Duration) -> CriterionOutcome {
    let opts = SuiteOptions { only: vec![id], ..SuiteOptions::default() };
    let report = run_suite(&opts).expect("suite runs within the memory budget");
    let c = report.criteria.into_iter().find(|c| c.id == id).expect("criterion ran");
    let within = c.wall_time_s <= limit.as_secs_f64();
    let line = format!(
        "criterion {:>2} {} {}: {} [{:.2} s of {} s]\n",
        id,
        if c.pass && within { "PASS" } else { "FAIL" },
        CRITERIA[id as usize - 1].1,
        c.summary,
        c.wall_time_s,
        limit.as_secs()
    );
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(c.pass, "criterion {id}: {}", c.summary);
    assert!(within, "criterion {id} took {:.1} s", c.wall_time_s);
    c
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn criterion_01_kernel_exactness() {
    criterion(1, secs(10));
}

#[test]
fn criterion_02_transform_factorization() {
    let c = criterion(2, secs(60));
    assert!(c.data["max_deviation"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn criterion_03_discrete_kernel_bound() {
    let c = criterion(3, secs(30));
    assert_eq!(c.data["cases"].as_array().unwrap().len(), 27);
}

#[test]
fn criterion_04_numerical_lemma() {
    let c = criterion(4, secs(60));
    assert!((c.data["interval_101"].as_f64().unwrap() - 2.856).abs() <= 0.01);
}

#[test]
fn criterion_05_bernstein() {
    criterion(5, secs(120));
}

#[test]
fn criterion_06_good_modulus() {
    criterion(6, secs(30));
}

#[test]
fn criterion_07_thinning() {
    criterion(7, secs(300));
}

#[test]
fn criterion_08_harmonic_constant_scan() {
    let c = criterion(8, secs(300));
    assert!(c.data["min"].as_f64().unwrap() >= 0.25);
}

#[test]
fn criterion_09_lattice_box() {
    let c = criterion(9, secs(600));
    assert!(c.data["lhs"]["lo"].as_f64().unwrap() >= 0.0625 * 32f64.ln().powi(2));
}

#[test]
fn criterion_10_integer_structure() {
    // includes its own run of the criterion 8 scan for the empirical constant
    criterion(10, secs(420));
}

#[test]
fn criterion_11_determinism() {
    criterion(11, secs(1200));
}
