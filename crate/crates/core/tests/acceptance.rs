//! One test per acceptance criterion; each prints a PASS/FAIL line.

use std::io::Write;

use pencilrange::acceptance::{self, Outcome};

// written to the raw handle so the line shows without --nocapture
fn report(o: Outcome) {
    let _ = writeln!(std::io::stderr(), "{o}");
    assert!(o.passed, "{o}");
}

#[test]
fn criterion_01_unifpos_ranges() {
    report(acceptance::criterion_1());
}

#[test]
fn criterion_02_jt_exactness_and_pollution() {
    report(acceptance::criterion_2());
}

#[test]
fn criterion_03_gap_multiplier() {
    report(acceptance::criterion_3());
}

#[test]
fn criterion_04_stokes_figures() {
    report(acceptance::criterion_4());
}

#[test]
fn criterion_05_sturm_liouville_confinement() {
    report(acceptance::criterion_5());
}

#[test]
fn criterion_06_pt_symmetric_exactness() {
    report(acceptance::criterion_6());
}

#[test]
fn criterion_07_polar_multiplier_intersection() {
    report(acceptance::criterion_7());
}

#[test]
fn criterion_08_resolvent_bounds() {
    report(acceptance::criterion_8());
}

#[test]
fn criterion_09_hain_lust_truncation() {
    report(acceptance::criterion_9());
}

#[test]
fn criterion_10_property_suites() {
    report(acceptance::criterion_10());
}
