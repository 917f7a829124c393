//! Acceptance criteria, one line per check. Exits nonzero if any check fails.

use qecbound::verify::{all_passed, run, VerifyOptions};

fn main() {
    let outcomes = run(&VerifyOptions::default(), |o| println!("{}", o));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {} failed", outcomes.len() - failed, failed);
    if !all_passed(&outcomes) {
        std::process::exit(1);
    }
}
