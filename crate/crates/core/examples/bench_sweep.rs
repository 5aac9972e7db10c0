//! Runs a small scaling sweep and prints the summary table.
//!
//! ```text
//! cargo run --release --example bench_sweep -- [family] [k] [grid] [reps] [algos] [base2d]
//! cargo run --release --example bench_sweep -- hidden_point 3 16..4096 20 new,dqy fps
//! ```

use tarski_core::bench::{parse_algorithms, parse_grid, run_bench, summarize, BenchConfig};
use tarski_core::instances::Family;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());

    let family: Family = arg(0, "hidden_point").parse()?;
    let k: usize = arg(1, "3").parse()?;
    let mut cfg = BenchConfig::new(family, k, parse_grid(&arg(2, "16..1024"))?);
    cfg.reps = arg(3, "10").parse()?;
    cfg.algorithms = parse_algorithms(&arg(4, "new,dqy"))?;
    cfg.base2d = arg(5, "fps").parse()?;
    cfg.seed = 1;

    let records = run_bench(&cfg)?;
    println!(
        "{} runs, all valid: {}",
        records.len(),
        records.iter().all(|r| r.valid)
    );
    for s in summarize(&records) {
        println!("{s}");
    }
    Ok(())
}
