//! Acceptance criteria 1 to 9, one pass/fail line each, plus runtime budgets
//! and byte-identical `qsl check` output across two runs.

use std::process::Command;

use qsl_cli::check::{self, CRITERIA};

#[test]
fn acceptance_criteria() {
    let mut failures = Vec::new();
    for c in CRITERIA {
        let outcome = check::run_criterion(c.id, 0);
        println!("{}", outcome.line(true));
        if !outcome.passed {
            failures.push(format!("criterion {} failed: {}", c.id, outcome.detail));
        }
        if !outcome.within_budget() {
            failures.push(format!("criterion {} took {:?}, budget {:?}", c.id, outcome.elapsed, c.budget));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn check_output_is_byte_identical_across_runs() {
    let run = || Command::new(env!("CARGO_BIN_EXE_qsl")).args(["check", "--seed", "0"]).output().expect("binary runs");
    let (first, second) = (run(), run());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stdout));
    assert!(second.status.success());
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout);
    let pass = if first.stdout == second.stdout { "PASS" } else { "FAIL" };
    println!("[{pass}] 9 deterministic reports: two `qsl check` runs, {} bytes each", first.stdout.len());
}
