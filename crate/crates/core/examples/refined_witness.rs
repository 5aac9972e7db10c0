//! Builds refined witness pairs with at most two runs of a base solver.

use tarski_core::oracle::{NativeSignOracle, SignFn};
use tarski_core::star::{solve_refined_star, solve_star_1d, SolveContext};
use tarski_core::{sgn, GridBox, Point, SignVector};

type Signs = fn(i64) -> [i64; 2];

fn oracle(n: i64, f: Signs) -> NativeSignOracle {
    let b = GridBox::cube(n, 1).unwrap();
    NativeSignOracle::from_map(SignFn::new(b, move |x: &Point| {
        SignVector::from_diffs(f(x[0]))
    }))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: [(&str, Signs); 3] = [
        ("last sign +1 everywhere", |x| [sgn(3 - x) as i64, 1]),
        ("last sign -1 everywhere", |x| [sgn(3 - x) as i64, -1]),
        ("last sign zero where the first is", |x| {
            [sgn(4 - x) as i64, sgn(x - 4) as i64]
        }),
    ];
    for (name, f) in cases {
        let mut o = oracle(9, f);
        let w = solve_refined_star(&mut o, &solve_star_1d, &mut SolveContext::default())?;
        println!(
            "{name}: p_left = {}, p_right = {}, case {}, {} solver calls",
            w.p_left,
            w.p_right,
            w.case.number(),
            w.solver_calls
        );
    }
    Ok(())
}
