//! Finds a fixed point of a monotone map on `[n]^k` with the slicing
//! algorithm and with the coordinate-bisection baseline.
//!
//! ```text
//! cargo run --release --example solve_fixed_point -- [n] [k] [seed]
//! ```

use tarski_core::instances::{Family, InstanceSpec};
use tarski_core::oracle::FnOracle;
use tarski_core::outer::{solve_tarski, solve_tarski_dqy, verify_fixed_point};
use tarski_core::star::{SolveContext, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: i64 = args.first().map_or(Ok(1024), |s| s.parse())?;
    let k: usize = args.get(1).map_or(Ok(3), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(7), |s| s.parse())?;

    let spec = InstanceSpec::sample(Family::CoupledPoint, &vec![n; k], seed, 0)?;
    println!(
        "instance: {}",
        tarski_core::instances::serialize_instance(&spec)
    );

    let mut f = FnOracle::new(spec.to_map()?);
    let mut ctx = SolveContext::new(SolverConfig::default().with_debug_checks(false));
    let res = solve_tarski(&mut f, &mut ctx)?;
    println!(
        "slicing:  {} after {} rounds, {} distinct queries, fixed = {}",
        res.point,
        res.rounds,
        res.stats.budget_queries,
        verify_fixed_point(&f, &res.point)
    );

    let mut f = FnOracle::new(spec.to_map()?);
    let res = solve_tarski_dqy(&mut f)?;
    println!(
        "baseline: {} with {} distinct queries, fixed = {}",
        res.point,
        res.stats.budget_queries,
        verify_fixed_point(&f, &res.point)
    );
    Ok(())
}
