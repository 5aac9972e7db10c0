use crate::error::{Result, TarskiError};
use crate::lattice::{GridBox, Point, SignVector};
use crate::oracle::{
    box_restriction, collapse_last_down, collapse_last_up, SignOracle, DEBUG_LABEL,
};

use super::{Check, SolveContext, StarSolver};

/// Which condition the last sign meets at the witness pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefinedCase {
    /// `g(p_left)_{k+1} = +1`.
    LeftUp,
    /// `g(p_right)_{k+1} = -1`.
    RightDown,
    /// `g(p_left)_{k+1} = g(p_right)_{k+1} = 0`.
    BothZero,
}

impl RefinedCase {
    pub fn number(self) -> u8 {
        match self {
            RefinedCase::LeftUp => 1,
            RefinedCase::RightDown => 2,
            RefinedCase::BothZero => 3,
        }
    }
}

/// An ordered pair `p_left ⪯ p_right` with `g(p_left)_t >= 0` and
/// `g(p_right)_t <= 0` for every `t <= k`, plus a condition on the last sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedWitness {
    pub p_left: Point,
    pub p_right: Point,
    pub case: RefinedCase,
    /// Calls made to the underlying solver (at most 2).
    pub solver_calls: u32,
}

impl RefinedWitness {
    /// Checks the witness conditions against the given signs.
    pub fn conforms(&self, left: &SignVector, right: &SignVector) -> bool {
        let k = self.p_left.dim();
        let ordered = self.p_left.precedes(&self.p_right);
        let signs = (0..k).all(|t| left.get(t) >= 0 && right.get(t) <= 0);
        let last = match self.case {
            RefinedCase::LeftUp => left.get(k) == 1,
            RefinedCase::RightDown => right.get(k) == -1,
            RefinedCase::BothZero => left.get(k) == 0 && right.get(k) == 0,
        };
        ordered && signs && last
    }
}

/// Builds a witness pair from at most two runs of `solve`.
///
/// The first run is on `g⁺` (last sign 0 read as +1). Its answer becomes
/// `p_left` if `g⁺` is +1 there, else `p_right`; a nonzero `g` at that
/// point settles the case. Otherwise the second run is on `g⁻` (0 read as
/// -1) restricted to `[p_left, p_right]`.
pub fn solve_refined_star(
    o: &mut dyn SignOracle,
    solve: &StarSolver<'_>,
    ctx: &mut SolveContext,
) -> Result<RefinedWitness> {
    let dom = o.domain().clone();
    let k = dom.dim();
    let mut p_left = dom.lo().clone();
    let mut p_right = dom.hi().clone();
    ctx.trace.refined_calls += 1;

    let first = solve(&mut collapse_last_up(o), ctx)?;
    let p = first.point;
    if first.signs.get(k) == 1 {
        p_left = p.clone();
    } else {
        p_right = p.clone();
    }
    let at_p = o.query(&p)?;
    let (case, calls) = if at_p.get(k) != 0 {
        let case = if at_p.get(k) == 1 {
            RefinedCase::LeftUp
        } else {
            RefinedCase::RightDown
        };
        (case, 1)
    } else {
        let sub = GridBox::new(p_left.clone(), p_right.clone())?;
        let mut down = collapse_last_down(o);
        let mut restricted = box_restriction(&mut down, sub, ctx.config.debug_checks)?;
        let second = solve(&mut restricted, ctx)?;
        if second.signs.get(k) == 1 {
            p_left = second.point;
            (RefinedCase::LeftUp, 2)
        } else {
            p_right = second.point;
            (RefinedCase::BothZero, 2)
        }
    };
    ctx.trace.max_solver_calls_per_refined = ctx.trace.max_solver_calls_per_refined.max(calls);

    let w = RefinedWitness {
        p_left,
        p_right,
        case,
        solver_calls: calls,
    };
    if ctx.config.debug_checks {
        let left = o.query_labeled(&w.p_left, DEBUG_LABEL)?;
        let right = o.query_labeled(&w.p_right, DEBUG_LABEL)?;
        let ok = w.conforms(&left, &right);
        ctx.trace.record(Check::WitnessSigns, ok, || {
            format!("refined witness {w:?} has signs {left} and {right}")
        });
        if !ok {
            return Err(TarskiError::invalid(format!(
                "refined witness {} / {} (case {}) has signs {left} and {right}",
                w.p_left,
                w.p_right,
                w.case.number()
            )));
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use std::cell::Cell;

    use super::*;
    use crate::lattice::sgn;
    use crate::star::test_support::sign_oracle;
    use crate::star::{solve_star, solve_star_1d, SolverConfig};

    fn run(sides: &[i64], f: impl Fn(&Point) -> Vec<i8> + Send + Sync + 'static) -> RefinedWitness {
        let mut o = sign_oracle(sides, f);
        let mut ctx = SolveContext::new(SolverConfig::default().with_debug_checks(true));
        let w = solve_refined_star(&mut o, &solve_star, &mut ctx).unwrap();
        let (l, r) = (o.fresh_eval(&w.p_left), o.fresh_eval(&w.p_right));
        assert!(w.conforms(&l, &r), "{w:?}");
        w
    }

    #[test]
    fn both_zero_at_unique_point() {
        let w = run(&[5], |x| vec![sgn(3 - x[0]), sgn(x[0] - 3)]);
        assert_eq!(w.case, RefinedCase::BothZero);
        assert_eq!(w.p_left, Point::from([3]));
        assert_eq!(w.p_right, Point::from([3]));
    }

    #[test]
    fn constant_up_is_case_one() {
        let w = run(&[5], |x| vec![sgn(3 - x[0]), 1]);
        assert_eq!(w.case, RefinedCase::LeftUp);
        assert!(w.p_left[0] <= 3);
        assert_eq!(w.p_right, Point::from([5]));
        assert_eq!(w.solver_calls, 1);
    }

    #[test]
    fn constant_down_is_case_two() {
        let w = run(&[5], |x| vec![sgn(3 - x[0]), -1]);
        assert_eq!(w.case, RefinedCase::RightDown);
        assert_eq!(w.solver_calls, 1);
    }

    #[test]
    fn at_most_two_solver_calls() {
        let calls = Cell::new(0u32);
        let counting = |o: &mut dyn SignOracle, ctx: &mut SolveContext| {
            calls.set(calls.get() + 1);
            solve_star_1d(o, ctx)
        };
        let mut o = sign_oracle(&[9], |x| vec![sgn(4 - x[0]), sgn(x[0] - 6)]);
        let w = solve_refined_star(&mut o, &counting, &mut SolveContext::default()).unwrap();
        assert_eq!(calls.get(), w.solver_calls);
        assert!(calls.get() <= 2);
    }

    #[test]
    fn two_dimensional_witness() {
        let w = run(&[6, 4], |x| {
            vec![sgn(4 - x[0]), sgn(2 - x[1]), sgn(x[0] - 2)]
        });
        assert!(w.p_left.precedes(&w.p_right));
    }
}
