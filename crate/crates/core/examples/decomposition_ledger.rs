//! Runs the decomposition on a four-dimensional sign oracle and prints the
//! simulated rounds seen by the outer two-dimensional solver.

use tarski_core::instances::HiddenSignPoint;
use tarski_core::oracle::NativeSignOracle;
use tarski_core::star::{
    decompose_star_with_ledger, solve_star, solve_star_2d, Check, SolveContext, SolverConfig,
};
use tarski_core::{GridBox, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = GridBox::cube(64, 4)?;
    let mut o = NativeSignOracle::from_map(HiddenSignPoint::new(b, Point::from([10, 50, 33, 7]))?);
    let mut ctx = SolveContext::new(SolverConfig::default().with_debug_checks(true));
    let (sol, ledger) =
        decompose_star_with_ledger(&mut o, 2, &solve_star, &solve_star_2d, &mut ctx)?;

    for (i, r) in ledger.rounds.iter().enumerate() {
        println!(
            "round {i:>2}: q = {:<8} r = {:<10} pair {} .. {}",
            r.q.to_string(),
            r.r.to_string(),
            r.p_left,
            r.p_right
        );
    }
    println!("solution {} with signs {}", sol.point, sol.signs);
    println!("consistent ledger: {}", ledger.inconsistency().is_none());
    for c in Check::ALL {
        println!(
            "{c:?}: {} checks, {} violations",
            ctx.trace.checks_of(c),
            ctx.trace.violations_of(c)
        );
    }
    println!(
        "{} distinct queries, {} refined calls",
        o.stats().budget_queries,
        ctx.trace.refined_calls
    );
    Ok(())
}
