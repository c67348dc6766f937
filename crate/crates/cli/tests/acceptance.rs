//! Runs every acceptance criterion, prints one line per criterion and fails
//! when any criterion fails.

use harness::acceptance;
use harness::config::DEFAULT_SEED;

fn main() {
    let report = acceptance::run_all(DEFAULT_SEED);
    for c in &report.criteria {
        println!("{}", c.line());
        for f in c.failures() {
            println!("    failed: {} (expected {}, got {}, tolerance {:?})", f.name, f.expected, f.got, f.tolerance);
        }
    }
    let passed = report.criteria.iter().filter(|c| c.pass).count();
    println!("acceptance: {passed}/{} criteria passed", report.criteria.len());
    if !report.pass {
        std::process::exit(1);
    }
}
