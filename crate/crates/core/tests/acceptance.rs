//! Runs every acceptance criterion, printing one PASS/FAIL line each.
//!
//! Built without the libtest harness so that all lines are shown; the process
//! exits with status 1 when any criterion fails.

use std::time::Instant;

use thinspec::verify;

fn main() {
    let start = Instant::now();
    let mut failed = Vec::new();
    for id in 1..=verify::CRITERIA.len() {
        let t = Instant::now();
        let outcome = verify::criterion(id);
        println!("{outcome} [{:.1?}]", t.elapsed());
        if !outcome.passed {
            failed.push(id);
        }
    }
    let total = verify::CRITERIA.len();
    println!(
        "acceptance: {} of {total} criteria passed in {:.1?}{}",
        total - failed.len(),
        start.elapsed(),
        if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
