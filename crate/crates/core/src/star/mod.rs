//! Solvers for the sign-oracle search problem: find `x` whose signs
//! `g(x) ∈ {-1,0,1}^{k+1}` are all `>= 0` or all `<= 0`.
//!
//! * [`solve_star_1d`]: bisection, `⌈log₂ n⌉ + 3` queries.
//! * [`solve_star_2d_fps`]: rectangle shrinking, `O(log n)` queries.
//! * [`solve_star_2d_staircase`]: rows-of-columns search, `O(log² n)`.
//! * [`solve_refined_star`]: an ordered witness pair from two solver calls.
//! * [`decompose_star`]: an `(a+b)`-dim instance from `a`- and `b`-dim solvers.
//! * [`solve_star`]: dispatch by dimension.

mod decompose;
mod one_dim;
mod refined;
mod two_dim;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use decompose::{decompose_star, decompose_star_with_ledger, DecompositionLedger, LedgerRound};
pub use one_dim::{bracketed_zero_in_row, solve_star_1d};
pub use refined::{solve_refined_star, RefinedCase, RefinedWitness};
pub use two_dim::{solve_star_2d_fps, solve_star_2d_staircase, FPS_BUDGET_CONSTANT};

use crate::error::{Result, TarskiError};
use crate::lattice::{Point, SignVector};
use crate::oracle::SignOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Nonneg,
    Nonpos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarSolution {
    pub point: Point,
    pub signs: SignVector,
    pub polarity: Polarity,
}

impl StarSolution {
    /// `None` unless `signs` is uniform. All-zero signs count as nonpos.
    pub fn from_signs(point: Point, signs: SignVector) -> Option<Self> {
        let polarity = if signs.uniform_nonpos() {
            Polarity::Nonpos
        } else if signs.uniform_nonneg() {
            Polarity::Nonneg
        } else {
            return None;
        };
        Some(StarSolution {
            point,
            signs,
            polarity,
        })
    }
}

impl fmt::Display for StarSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} with signs {}", self.point, self.signs)
    }
}

/// Queries `x` and returns it as a solution when its signs are uniform.
pub(crate) fn try_point(o: &mut dyn SignOracle, x: &Point) -> Result<Option<StarSolution>> {
    let g = o.query(x)?;
    Ok(StarSolution::from_signs(x.clone(), g))
}

/// Checks that `sol` is a solution of `o` using a debug-labelled query.
pub fn check_solution(o: &mut dyn SignOracle, sol: &StarSolution) -> Result<()> {
    let g = o.query_labeled(&sol.point, crate::oracle::DEBUG_LABEL)?;
    let ok = match sol.polarity {
        Polarity::Nonneg => g.uniform_nonneg(),
        Polarity::Nonpos => g.uniform_nonpos(),
    };
    if ok && g == sol.signs {
        Ok(())
    } else {
        Err(TarskiError::Contract(format!(
            "returned {sol} but the oracle gives {g}"
        )))
    }
}

/// Two-dimensional base solver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Base2d {
    #[default]
    Fps,
    Staircase,
}

impl Base2d {
    pub fn name(self) -> &'static str {
        match self {
            Base2d::Fps => "fps",
            Base2d::Staircase => "staircase",
        }
    }
}

impl fmt::Display for Base2d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Base2d {
    type Err = TarskiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fps" => Ok(Base2d::Fps),
            "staircase" => Ok(Base2d::Staircase),
            _ => Err(TarskiError::usage(format!(
                "unknown 2-D base {s:?} (expected fps or staircase)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub base2d: Base2d,
    /// Run the runtime invariant checks (extra queries are labelled debug).
    pub debug_checks: bool,
    /// Seed each decomposition round from comparable earlier rounds.
    pub warm_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            base2d: Base2d::Fps,
            debug_checks: debug_checks_from_env(),
            warm_start: true,
        }
    }
}

impl SolverConfig {
    pub fn with_base2d(mut self, base2d: Base2d) -> Self {
        self.base2d = base2d;
        self
    }

    pub fn with_debug_checks(mut self, on: bool) -> Self {
        self.debug_checks = on;
        self
    }

    pub fn with_warm_start(mut self, on: bool) -> Self {
        self.warm_start = on;
        self
    }
}

/// `TARSKI_DEBUG_CHECKS=0|1` if set, otherwise on in debug builds.
pub fn debug_checks_from_env() -> bool {
    match std::env::var("TARSKI_DEBUG_CHECKS").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => cfg!(debug_assertions),
    }
}

/// Runtime invariants that can be checked while solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Simulated answers are consistent across comparable rounds.
    LedgerConsistency,
    /// Witness pair is ordered and has the required signs.
    WitnessSigns,
    /// Both witness corners agree on the trailing signs.
    CornerEquality,
    /// Outer loop keeps `ℓ ⪯ f(ℓ)` and `f(r) ⪯ r`.
    OuterLoop,
    /// Each round makes exactly `b + 1` refined calls.
    RefinedCallCount,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::LedgerConsistency,
        Check::WitnessSigns,
        Check::CornerEquality,
        Check::OuterLoop,
        Check::RefinedCallCount,
    ];
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub checks: BTreeMap<Check, u64>,
    pub violations: BTreeMap<Check, u64>,
    /// First few violation messages.
    pub messages: Vec<String>,
    /// Simulated rounds over all decompositions.
    pub rounds: u64,
    pub refined_calls: u64,
    /// Largest number of inner solver calls made by one refined call.
    pub max_solver_calls_per_refined: u32,
}

const MAX_MESSAGES: usize = 16;

impl Trace {
    pub fn record(&mut self, check: Check, ok: bool, message: impl FnOnce() -> String) {
        *self.checks.entry(check).or_insert(0) += 1;
        if !ok {
            *self.violations.entry(check).or_insert(0) += 1;
            if self.messages.len() < MAX_MESSAGES {
                self.messages.push(message());
            }
        }
    }

    pub fn checks_of(&self, check: Check) -> u64 {
        self.checks.get(&check).copied().unwrap_or(0)
    }

    pub fn violations_of(&self, check: Check) -> u64 {
        self.violations.get(&check).copied().unwrap_or(0)
    }

    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }

    pub fn merge(&mut self, other: Trace) {
        for (c, n) in other.checks {
            *self.checks.entry(c).or_insert(0) += n;
        }
        for (c, n) in other.violations {
            *self.violations.entry(c).or_insert(0) += n;
        }
        let room = MAX_MESSAGES.saturating_sub(self.messages.len());
        self.messages.extend(other.messages.into_iter().take(room));
        self.rounds += other.rounds;
        self.refined_calls += other.refined_calls;
        self.max_solver_calls_per_refined = self
            .max_solver_calls_per_refined
            .max(other.max_solver_calls_per_refined);
    }
}

/// Configuration plus the trace a run accumulates.
#[derive(Clone, Debug, Default)]
pub struct SolveContext {
    pub config: SolverConfig,
    pub trace: Trace,
}

impl SolveContext {
    pub fn new(config: SolverConfig) -> Self {
        SolveContext {
            config,
            trace: Trace::default(),
        }
    }
}

/// Common signature of every solver, so they can be passed to the
/// refinement and decomposition drivers.
pub type StarSolver<'f> =
    dyn Fn(&mut dyn SignOracle, &mut SolveContext) -> Result<StarSolution> + 'f;

/// The configured two-dimensional base solver.
pub fn solve_star_2d(o: &mut dyn SignOracle, ctx: &mut SolveContext) -> Result<StarSolution> {
    match ctx.config.base2d {
        Base2d::Fps => solve_star_2d_fps(o, ctx),
        Base2d::Staircase => solve_star_2d_staircase(o, ctx),
    }
}

/// Dimension dispatcher: 1-D bisection, the configured 2-D base, and for
/// `k >= 3` a decomposition into `k - 2` leading and 2 trailing coordinates.
pub fn solve_star(o: &mut dyn SignOracle, ctx: &mut SolveContext) -> Result<StarSolution> {
    let k = o.domain().dim();
    if o.outputs() != k + 1 {
        return Err(TarskiError::usage(format!(
            "a {k}-dimensional sign oracle must have {} outputs, found {}",
            k + 1,
            o.outputs()
        )));
    }
    match k {
        1 => solve_star_1d(o, ctx),
        2 => solve_star_2d(o, ctx),
        _ => decompose_star(o, k - 2, &solve_star, &solve_star_2d, ctx),
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::lattice::{GridBox, Point, SignVector};
    use crate::oracle::{NativeSignOracle, SignFn};

    pub fn sign_oracle<F>(sides: &[i64], f: F) -> NativeSignOracle
    where
        F: Fn(&Point) -> Vec<i8> + Send + Sync + 'static,
    {
        let b = GridBox::from_sides(sides).unwrap();
        NativeSignOracle::from_map(SignFn::new(b, move |x: &Point| {
            SignVector::new(f(x)).unwrap()
        }))
    }

    /// Every uniform point, by scanning the whole box.
    pub fn solutions(o: &NativeSignOracle, b: &GridBox) -> Vec<Point> {
        b.iter().filter(|x| o.fresh_eval(x).is_uniform()).collect()
    }
}
