//! Solves a two-dimensional sign-oracle problem with both base solvers and
//! checks the answers by brute force.

use tarski_core::instances::HiddenSignPoint;
use tarski_core::oracle::{validate, NativeSignOracle, SignFn, ValidationMode};
use tarski_core::star::{solve_star_2d_fps, solve_star_2d_staircase, SolveContext, StarSolver};
use tarski_core::{sgn, GridBox, Point, SignVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Every point except (700, 300) is mixed.
    let b = GridBox::cube(1000, 2)?;
    let solvers: [(&str, &StarSolver<'_>); 2] = [
        ("fps", &solve_star_2d_fps),
        ("staircase", &solve_star_2d_staircase),
    ];
    for (name, solve) in solvers {
        let mut o =
            NativeSignOracle::from_map(HiddenSignPoint::new(b.clone(), Point::from([700, 300]))?);
        let sol = solve(&mut o, &mut SolveContext::default())?;
        println!(
            "{name:>9}: {} with signs {}, {} distinct queries",
            sol.point,
            sol.signs,
            o.stats().budget_queries
        );
    }

    // A hand-written oracle on [3]^2 with several solutions.
    let small = GridBox::cube(3, 2)?;
    let mut o = NativeSignOracle::from_map(SignFn::new(small.clone(), |x: &Point| {
        SignVector::from_diffs(
            [2 - x[0], 2 - x[1], x[0] + x[1] - 4]
                .map(sgn)
                .map(i64::from),
        )
    }));
    println!(
        "valid: {}",
        validate(&mut o, ValidationMode::exhaustive())?.is_ok()
    );
    let solutions: Vec<Point> = small
        .iter()
        .filter(|x| o.fresh_eval(x).is_uniform())
        .collect();
    let sol = solve_star_2d_fps(&mut o, &mut SolveContext::default())?;
    println!(
        "solutions {solutions:?}; fps returned {} ({:?})",
        sol.point, sol.polarity
    );
    Ok(())
}
