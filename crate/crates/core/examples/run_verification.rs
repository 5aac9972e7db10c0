//! Runs one of the verification suites and prints its report.
//!
//! ```text
//! cargo run --release --example run_verification -- [suite] [cap]
//! ```

use tarski_core::verify::{run_suite, Suite, SuiteOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let suite: Suite = args.first().map_or("budgets", String::as_str).parse()?;
    let cap = args.get(1).map(|c| c.parse()).transpose()?;
    let report = run_suite(suite, &SuiteOptions { seed: 1, cap })?;
    println!("{report}");
    std::process::exit(if report.passed() { 0 } else { 1 });
}
