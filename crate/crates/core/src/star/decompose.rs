use std::collections::HashMap;

use crate::error::{Result, TarskiError};
use crate::lattice::{glb, lub, GridBox, Point, SignVector};
use crate::oracle::{box_restriction, project_last, SignOracle, DEBUG_LABEL};

use super::{solve_refined_star, Check, SolveContext, StarSolution, StarSolver};

/// Pairwise consistency is checked only while the ledger has at most this
/// many rounds.
const CONSISTENCY_CHECK_LIMIT: usize = 10_000;

/// One simulated query of the outer solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRound {
    /// The outer solver's query over the trailing `b` coordinates.
    pub q: Point,
    /// The simulated answer, `g(p_left, q)` restricted to the last `b + 1`
    /// signs.
    pub r: SignVector,
    pub p_left: Point,
    pub p_right: Point,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionLedger {
    pub rounds: Vec<LedgerRound>,
}

impl DecompositionLedger {
    /// First pair of rounds `(i, j)` with `q_i ⪯ q_j` but
    /// `(q_i, 0) + r_i ⋠ (q_j, 0) + r_j`.
    pub fn inconsistency(&self) -> Option<(usize, usize)> {
        for (j, later) in self.rounds.iter().enumerate() {
            for (i, earlier) in self.rounds[..j].iter().enumerate() {
                if !consistent(earlier, later) {
                    return Some((i, j));
                }
                if !consistent(later, earlier) {
                    return Some((j, i));
                }
            }
        }
        None
    }
}

/// `(q_lo, 0) + r_lo ⪯ (q_hi, 0) + r_hi` whenever `q_lo ⪯ q_hi`.
fn consistent(lo: &LedgerRound, hi: &LedgerRound) -> bool {
    if !lo.q.precedes(&hi.q) {
        return true;
    }
    let b = lo.q.dim();
    (0..=b).all(|t| {
        let (x, y) = if t < b { (lo.q[t], hi.q[t]) } else { (0, 0) };
        x + lo.r.get(t) as i64 <= y + hi.r.get(t) as i64
    })
}

/// The `b`-dimensional oracle the outer solver sees. Each query runs
/// `b + 1` refined searches over the leading `a` coordinates.
struct VirtualOracle<'a, 's> {
    o: &'a mut dyn SignOracle,
    a: usize,
    prefix: GridBox,
    suffix: GridBox,
    solve_a: &'s StarSolver<'s>,
    ctx: SolveContext,
    ledger: DecompositionLedger,
    answers: HashMap<Point, SignVector>,
    found: Option<StarSolution>,
}

impl VirtualOracle<'_, '_> {
    fn round(&mut self, q: &Point) -> Result<SignVector> {
        let a = self.a;
        let b = self.suffix.dim();
        let earlier = &self.ledger.rounds;
        let (mut p_left, mut p_right) = if self.ctx.config.warm_start {
            let below = earlier
                .iter()
                .filter(|r| r.q.precedes(q))
                .map(|r| &r.p_left);
            let above = earlier
                .iter()
                .filter(|r| q.precedes(&r.q))
                .map(|r| &r.p_right);
            (
                lub(std::iter::once(self.prefix.lo()).chain(below))?,
                glb(std::iter::once(self.prefix.hi()).chain(above))?,
            )
        } else {
            (self.prefix.lo().clone(), self.prefix.hi().clone())
        };

        let mut refined_calls = 0;
        for j in a..=a + b {
            let sub = GridBox::new(p_left.clone(), p_right.clone()).map_err(|_| {
                TarskiError::invalid(format!(
                    "warm start produced an unordered pair {p_left} / {p_right} for {q}"
                ))
            })?;
            let mut gj = project_last(&mut *self.o, q.clone(), j)?;
            let mut restricted = box_restriction(&mut gj, sub, self.ctx.config.debug_checks)?;
            let w = solve_refined_star(&mut restricted, self.solve_a, &mut self.ctx)?;
            p_left = w.p_left;
            p_right = w.p_right;
            refined_calls += 1;
        }

        let left = self.o.query(&p_left.concat(q))?;
        let r = SignVector::new(left.as_slice()[a..].to_vec())?;
        self.ctx.trace.rounds += 1;

        let round = LedgerRound {
            q: q.clone(),
            r: r.clone(),
            p_left,
            p_right,
        };
        if self.ctx.config.debug_checks {
            self.check_round(&round, &left, refined_calls)?;
        }
        self.ledger.rounds.push(round);
        Ok(r)
    }

    fn check_round(
        &mut self,
        round: &LedgerRound,
        left: &SignVector,
        refined_calls: usize,
    ) -> Result<()> {
        let a = self.a;
        let b = self.suffix.dim();
        let trace = &mut self.ctx.trace;

        let calls_ok = refined_calls == b + 1;
        trace.record(Check::RefinedCallCount, calls_ok, || {
            format!(
                "round at {} made {refined_calls} refined calls, expected {}",
                round.q,
                b + 1
            )
        });

        let right = self
            .o
            .query_labeled(&round.p_right.concat(&round.q), DEBUG_LABEL)?;
        let witness_ok = round.p_left.precedes(&round.p_right)
            && (0..a).all(|t| left.get(t) >= 0 && right.get(t) <= 0);
        trace.record(Check::WitnessSigns, witness_ok, || {
            format!(
                "round at {}: witness {} / {} has signs {left} / {right}",
                round.q, round.p_left, round.p_right
            )
        });
        let corners_ok = (a..=a + b).all(|t| left.get(t) == right.get(t));
        trace.record(Check::CornerEquality, corners_ok, || {
            format!(
                "round at {}: corner signs {left} and {right} differ past {a}",
                round.q
            )
        });

        let mut consistency_ok = true;
        if self.ledger.rounds.len() < CONSISTENCY_CHECK_LIMIT {
            consistency_ok = self
                .ledger
                .rounds
                .iter()
                .all(|e| consistent(e, round) && consistent(round, e));
            trace.record(Check::LedgerConsistency, consistency_ok, || {
                format!(
                    "round at {} answered {} inconsistently with an earlier round",
                    round.q, round.r
                )
            });
        }

        if !(calls_ok && witness_ok && corners_ok) {
            return Err(TarskiError::invalid(format!(
                "decomposition round at {} broke a ledger invariant",
                round.q
            )));
        }
        if !consistency_ok && self.ctx.config.warm_start {
            return Err(TarskiError::invalid(format!(
                "simulated answer {} at {} contradicts an earlier round",
                round.r, round.q
            )));
        }
        Ok(())
    }
}

impl SignOracle for VirtualOracle<'_, '_> {
    fn domain(&self) -> &GridBox {
        &self.suffix
    }

    fn label(&self) -> &'static str {
        "virtual"
    }

    fn query_labeled(&mut self, q: &Point, _label: &'static str) -> Result<SignVector> {
        if self.found.is_some() {
            return Err(TarskiError::Interrupted);
        }
        self.suffix.check_contains(q)?;
        if let Some(r) = self.answers.get(q) {
            return Ok(r.clone());
        }
        let r = self.round(q)?;
        let last = self.ledger.rounds.last().expect("round was just recorded");
        let solution = if r.uniform_nonneg() {
            let x = last.p_left.concat(q);
            let g = self.o.query(&x)?;
            Some(StarSolution::from_signs(x, g))
        } else if r.uniform_nonpos() {
            let x = last.p_right.concat(q);
            let g = self.o.query(&x)?;
            Some(StarSolution::from_signs(x, g))
        } else {
            None
        };
        match solution {
            Some(Some(sol)) => {
                self.found = Some(sol);
                Err(TarskiError::Interrupted)
            }
            Some(None) => Err(TarskiError::invalid(format!(
                "uniform simulated answer {r} at {q} does not lift to a solution"
            ))),
            None => {
                self.answers.insert(q.clone(), r.clone());
                Ok(r)
            }
        }
    }
}

/// Solves an `(a+b)`-dimensional instance by running `solve_b` on the last
/// `b` coordinates against a simulated oracle, answering each of its queries
/// `q` with `b + 1` refined searches over the first `a` coordinates.
///
/// A round returns as soon as its answer is uniform: the witness corner on
/// the matching side is then a solution of the full instance.
pub fn decompose_star(
    o: &mut dyn SignOracle,
    a: usize,
    solve_a: &StarSolver<'_>,
    solve_b: &StarSolver<'_>,
    ctx: &mut SolveContext,
) -> Result<StarSolution> {
    decompose_star_with_ledger(o, a, solve_a, solve_b, ctx).map(|(sol, _)| sol)
}

/// [`decompose_star`], also returning the ledger of simulated rounds.
pub fn decompose_star_with_ledger(
    o: &mut dyn SignOracle,
    a: usize,
    solve_a: &StarSolver<'_>,
    solve_b: &StarSolver<'_>,
    ctx: &mut SolveContext,
) -> Result<(StarSolution, DecompositionLedger)> {
    let dim = o.domain().dim();
    if a == 0 || a >= dim {
        return Err(TarskiError::usage(format!(
            "cannot split {dim} coordinates into {a} and {}",
            dim as i64 - a as i64
        )));
    }
    let (prefix, suffix) = o.domain().split_at(a)?;
    let mut v = VirtualOracle {
        o,
        a,
        prefix,
        suffix,
        solve_a,
        ctx: SolveContext::new(ctx.config),
        ledger: DecompositionLedger::default(),
        answers: HashMap::new(),
        found: None,
    };
    let outcome = solve_b(&mut v, ctx);
    ctx.trace.merge(std::mem::take(&mut v.ctx.trace));
    match (outcome, v.found) {
        (Err(TarskiError::Interrupted), Some(sol)) => Ok((sol, v.ledger)),
        (Err(e), _) => Err(e),
        (Ok(sol), _) => Err(TarskiError::Contract(format!(
            "outer solver returned {sol} without querying a point whose simulated answer is uniform"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sgn;
    use crate::star::test_support::{sign_oracle, solutions};
    use crate::star::{solve_star, solve_star_1d, solve_star_2d, SolverConfig};

    fn debug_ctx() -> SolveContext {
        SolveContext::new(SolverConfig::default().with_debug_checks(true))
    }

    #[test]
    fn one_plus_one_on_the_diagonal_example() {
        let mut o = sign_oracle(&[3, 3], |x| {
            vec![sgn(2 - x[0]), sgn(2 - x[1]), sgn(x[0] + x[1] - 4)]
        });
        let mut ctx = debug_ctx();
        let (sol, ledger) =
            decompose_star_with_ledger(&mut o, 1, &solve_star_1d, &solve_star_1d, &mut ctx)
                .unwrap();
        assert!(solutions(&o, &GridBox::cube(3, 2).unwrap()).contains(&sol.point));
        assert!(ledger.inconsistency().is_none());
        assert_eq!(ctx.trace.total_violations(), 0);
        assert_eq!(
            ctx.trace.checks_of(Check::RefinedCallCount),
            ledger.rounds.len() as u64
        );
    }

    #[test]
    fn uniform_first_answer_ends_after_one_round() {
        let mut o = sign_oracle(&[4, 4, 4], |_| vec![0, 0, 0, 1]);
        let mut ctx = debug_ctx();
        let (sol, ledger) =
            decompose_star_with_ledger(&mut o, 1, &solve_star, &solve_star_2d, &mut ctx).unwrap();
        assert_eq!(ledger.rounds.len(), 1);
        assert!(sol.signs.is_uniform());
    }

    #[test]
    fn refined_calls_per_round() {
        let p = [3i64, 5, 2, 6];
        let mut o = sign_oracle(&[7, 7, 7, 7], move |x| {
            let mut s: Vec<i8> = (0..4).map(|i| sgn(p[i] - x[i])).collect();
            s.push(sgn((0..4).map(|i| x[i] - p[i]).sum()));
            s
        });
        let mut ctx = debug_ctx();
        let (sol, ledger) =
            decompose_star_with_ledger(&mut o, 2, &solve_star, &solve_star_2d, &mut ctx).unwrap();
        assert_eq!(sol.point, Point::from(p));
        assert!(ledger.rounds.len() > 1);
        assert_eq!(ctx.trace.violations_of(Check::RefinedCallCount), 0);
        assert_eq!(
            ctx.trace.checks_of(Check::RefinedCallCount) as usize,
            ledger.rounds.len()
        );
        assert_eq!(ctx.trace.total_violations(), 0);
    }

    #[test]
    fn outer_solver_must_query_its_answer() {
        let lazy = |o: &mut dyn SignOracle, _: &mut SolveContext| {
            let x = o.domain().lo().clone();
            Ok(StarSolution::from_signs(x, SignVector::new(vec![0, 0]).unwrap()).unwrap())
        };
        let mut o = sign_oracle(&[3, 3], |x| vec![sgn(2 - x[0]), sgn(2 - x[1]), 0]);
        assert!(matches!(
            decompose_star(&mut o, 1, &solve_star_1d, &lazy, &mut debug_ctx()),
            Err(TarskiError::Contract(_))
        ));
    }
}
