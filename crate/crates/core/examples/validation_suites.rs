//! Runs one numerical check suite and prints each check.
//!
//! ```text
//! cargo run --release --example validation_suites -- codet
//! ```

use plausel::validation::{run_suite, Suite};

fn main() {
    let suite: Suite = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("tails")
        .parse()
        .unwrap_or_else(|e| {
            eprintln!("error: {e}");
            std::process::exit(2);
        });
    let report = run_suite(suite, 0).expect("suite runs");
    for c in &report.checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        println!("{status} {}/{}: {:.3e} (tolerance {:.1e}) {}", c.suite, c.name, c.measured, c.tolerance, c.detail);
    }
    println!("{}", if report.passed { "all checks passed" } else { "some checks failed" });
}
