//! Verification suites: exhaustive and randomized correctness, runtime
//! invariants, 2-D solver agreement, and query budgets.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TarskiError};
use crate::instances::{
    enumerate_monotone_maps, enumerate_sign_tables, serialize_instance, Family, Instance,
    InstanceSpec, RandomSteps, SignTable, SlicedSignCorpus, DEFAULT_COUNT_CAP,
};
use crate::lattice::{GridBox, Point};
use crate::oracle::{slice_oracle, FnOracle, NativeSignOracle, SignOracle};
use crate::outer::{
    all_fixed_points, solve_tarski, solve_tarski_brute, solve_tarski_dqy, verify_fixed_point,
};
use crate::rng::{derive_seed, seeded};
use crate::star::{
    solve_refined_star, solve_star_1d, solve_star_2d, solve_star_2d_fps, solve_star_2d_staircase,
    Check, SolveContext, SolverConfig, StarSolution, StarSolver, Trace, FPS_BUDGET_CONSTANT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ExhaustiveSmall,
    Random,
    Invariants,
    Differential2d,
    Budgets,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::ExhaustiveSmall,
        Suite::Random,
        Suite::Invariants,
        Suite::Differential2d,
        Suite::Budgets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ExhaustiveSmall => "exhaustive-small",
            Suite::Random => "random",
            Suite::Invariants => "invariants",
            Suite::Differential2d => "differential-2d",
            Suite::Budgets => "budgets",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = TarskiError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                TarskiError::usage(format!(
                    "unknown suite {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Upper limit on the instances run by each part of a suite.
    pub cap: Option<u64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 1, cap: None }
    }
}

impl SuiteOptions {
    fn limit(&self, default: u64) -> u64 {
        self.cap.map_or(default, |c| c.min(default))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// Enough to rebuild the instance: family, seed and sides, or the
    /// instance document itself.
    pub repro: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Tally {
    pub instances: u64,
    pub assertions: u64,
    pub failures: u64,
    pub first_failure: Option<Failure>,
}

impl Tally {
    fn check(
        &mut self,
        ok: bool,
        repro: impl FnOnce() -> String,
        message: impl FnOnce() -> String,
    ) {
        self.assertions += 1;
        if !ok {
            self.fail(repro(), message());
        }
    }

    fn fail(&mut self, repro: String, message: String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(Failure { repro, message });
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.assertions += other.assertions;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub tally: Tally,
    /// Measurements and per-part counts.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.tally.failures == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.tally;
        writeln!(
            f,
            "suite {}: {} instances, {} assertions, {} failures",
            self.suite, t.instances, t.assertions, t.failures
        )?;
        for n in &self.notes {
            writeln!(f, "  {n}")?;
        }
        if let Some(fail) = &t.first_failure {
            writeln!(f, "  first failure: {}", fail.message)?;
            writeln!(f, "  reproduce with: {}", fail.repro)?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let (tally, notes) = match suite {
        Suite::ExhaustiveSmall => exhaustive_small(opts)?,
        Suite::Random => random(opts)?,
        Suite::Invariants => invariants(opts)?,
        Suite::Differential2d => differential_2d(opts)?,
        Suite::Budgets => budgets(opts)?,
    };
    Ok(SuiteReport {
        suite,
        tally,
        notes,
    })
}

fn sum_tallies(parts: impl ParallelIterator<Item = Tally>) -> Tally {
    // Reduce keeps the order of the underlying indexed iterator, so the
    // reported first failure is deterministic.
    parts.reduce(Tally::default, Tally::merge)
}

fn sampled_repro(family: Family, sides: &[i64], seed: u64) -> String {
    format!("family={} sides={sides:?} seed={seed}", family.name())
}

type MapSolver<'a> = dyn Fn(&mut FnOracle) -> Result<Point> + 'a;

/// Runs the three map algorithms on one map and checks each answer against
/// the exhaustive fixed-point set.
pub fn check_map_exhaustively(
    f: &mut FnOracle,
    config: SolverConfig,
    repro: &dyn Fn() -> String,
) -> Tally {
    let mut t = Tally {
        instances: 1,
        ..Tally::default()
    };
    let dom = f.domain().clone();
    let fixed = match all_fixed_points(f, &dom) {
        Ok(v) => v,
        Err(e) => {
            t.fail(repro(), e.to_string());
            return t;
        }
    };
    let runs: [(&str, &MapSolver<'_>); 3] = [
        ("new", &|f| {
            solve_tarski(f, &mut SolveContext::new(config)).map(|r| r.point)
        }),
        ("dqy", &|f| solve_tarski_dqy(f).map(|r| r.point)),
        ("brute", &|f| solve_tarski_brute(f).map(|r| r.point)),
    ];
    for (name, run) in runs {
        let mut g = FnOracle::new(Box::new(crate::instances::TableMap::tabulate(f.map())));
        match run(&mut g) {
            Ok(x) => t.check(fixed.contains(&x), repro, || {
                format!("{name} returned {x}, not among the fixed points {fixed:?}")
            }),
            Err(e) => t.fail(repro(), format!("{name} failed: {e}")),
        }
    }
    t
}

/// Expected monotone self-map counts for the enumerated domains.
pub const EXHAUSTIVE_DOMAINS: [(&[i64], u64); 4] =
    [(&[2], 3), (&[3], 10), (&[2, 2], 36), (&[3, 3], 30625)];

fn exhaustive_small(opts: &SuiteOptions) -> Result<(Tally, Vec<String>)> {
    let config = SolverConfig::default().with_debug_checks(true);
    let mut total = Tally::default();
    let mut notes = Vec::new();
    for (sides, expected) in EXHAUSTIVE_DOMAINS {
        let dom = GridBox::from_sides(sides)?;
        let maps = enumerate_monotone_maps(&dom, DEFAULT_COUNT_CAP)?;
        let count = maps.len() as u64;
        total.check(
            count == expected,
            || format!("explicit_table sides={sides:?}"),
            || format!("{count} monotone self-maps of {dom}, expected {expected}"),
        );
        let maps: Vec<_> = maps.take(opts.limit(count) as usize).collect();
        let t = sum_tallies(maps.into_par_iter().map(|m| {
            let doc = serialize_instance(&InstanceSpec::from_map_table(&m));
            let mut f = FnOracle::from_map(m);
            check_map_exhaustively(&mut f, config, &|| doc.clone())
        }));
        notes.push(format!(
            "{dom}: {count} maps enumerated, {} checked",
            t.instances
        ));
        total = total.merge(t);
    }
    Ok((total, notes))
}

/// Families, dimensions and sides of the randomized correctness suite.
pub const RANDOM_FAMILIES: [Family; 3] = [
    Family::HiddenPoint,
    Family::ConstantShift,
    Family::RandomSteps,
];
pub const RANDOM_DIMS: [usize; 4] = [2, 3, 4, 5];
pub const RANDOM_SIDES: [i64; 3] = [4, 16, 64];

/// Instance `i` of the randomized schedule: cycles through every
/// (family, k, n) combination.
pub fn random_schedule(seed: u64, i: u64) -> (Family, Vec<i64>, u64) {
    let combos = (RANDOM_FAMILIES.len() * RANDOM_DIMS.len() * RANDOM_SIDES.len()) as u64;
    let c = (i % combos) as usize;
    let family = RANDOM_FAMILIES[c % RANDOM_FAMILIES.len()];
    let k = RANDOM_DIMS[(c / RANDOM_FAMILIES.len()) % RANDOM_DIMS.len()];
    let n = RANDOM_SIDES[c / (RANDOM_FAMILIES.len() * RANDOM_DIMS.len())];
    (family, vec![n; k], derive_seed(seed, &[i]))
}

fn random(opts: &SuiteOptions) -> Result<(Tally, Vec<String>)> {
    let count = opts.limit(10_000);
    let seed = opts.seed;
    let tally = sum_tallies((0..count).into_par_iter().map(|i| {
        let (family, sides, s) = random_schedule(seed, i);
        let repro = || sampled_repro(family, &sides, s);
        let mut t = Tally {
            instances: 1,
            ..Tally::default()
        };
        let spec = match InstanceSpec::sample(family, &sides, s, 8) {
            Ok(spec) => spec,
            Err(e) => {
                t.fail(repro(), e.to_string());
                return t;
            }
        };
        for algo in ["new", "dqy"] {
            let mut f = match spec.instantiate() {
                Ok(Instance::Map(f)) => f,
                _ => {
                    t.fail(repro(), "not a map family".into());
                    return t;
                }
            };
            let res = if algo == "new" {
                solve_tarski(&mut f, &mut SolveContext::new(SolverConfig::default()))
            } else {
                solve_tarski_dqy(&mut f)
            };
            match res {
                Ok(r) => t.check(verify_fixed_point(&f, &r.point), repro, || {
                    format!("{algo} returned {} which is not fixed", r.point)
                }),
                Err(e) => t.fail(repro(), format!("{algo} failed: {e}")),
            }
        }
        t
    }));
    let notes = vec![format!(
        "{} families x k in {:?} x n in {:?}",
        RANDOM_FAMILIES.len(),
        RANDOM_DIMS,
        RANDOM_SIDES
    )];
    Ok((tally, notes))
}

/// Map families and shapes used for debug-mode decomposition runs. With
/// `k >= 4` every slice has at least 3 dimensions, so each outer round
/// goes through a decomposition.
pub const INVARIANT_FAMILIES: [Family; 3] = [
    Family::RandomSteps,
    Family::CoupledPoint,
    Family::HiddenPoint,
];
pub const INVARIANT_DIMS: [usize; 2] = [4, 5];
pub const INVARIANT_SIDES: [i64; 3] = [4, 8, 16];

/// Runs `solve_tarski` with every debug check on and returns the verified
/// answer together with the trace.
pub fn debug_run(spec: &InstanceSpec, config: SolverConfig) -> Result<(Point, u64, Trace)> {
    let mut f = match spec.instantiate()? {
        Instance::Map(f) => f,
        Instance::Sign(_) => return Err(TarskiError::usage("debug runs need a map instance")),
    };
    let mut ctx = SolveContext::new(config.with_debug_checks(true));
    let res = solve_tarski(&mut f, &mut ctx)?;
    if !verify_fixed_point(&f, &res.point) {
        return Err(TarskiError::Contract(format!("{} is not fixed", res.point)));
    }
    Ok((res.point, res.rounds, ctx.trace))
}

fn invariants(opts: &SuiteOptions) -> Result<(Tally, Vec<String>)> {
    let runs = opts.limit(1000);
    let seed = opts.seed;
    let per_run: Vec<(Tally, Trace)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let c = i as usize;
            let family = INVARIANT_FAMILIES[c % 3];
            let k = INVARIANT_DIMS[(c / 3) % 2];
            let n = INVARIANT_SIDES[(c / 6) % 3];
            let sides = vec![n; k];
            let s = derive_seed(seed, &[i]);
            let repro = || sampled_repro(family, &sides, s);
            let mut t = Tally {
                instances: 1,
                ..Tally::default()
            };
            let run = InstanceSpec::sample(family, &sides, s, 8)
                .and_then(|spec| debug_run(&spec, SolverConfig::default()));
            match run {
                Ok((_, rounds, trace)) => {
                    let bound: u64 = sides.iter().map(|&n| ceil_log2(n)).sum();
                    t.check(rounds <= bound, repro, || {
                        format!("{rounds} outer rounds exceed the bound {bound}")
                    });
                    for c in Check::ALL {
                        t.check(trace.violations_of(c) == 0, repro, || {
                            format!("{c:?} violated: {:?}", trace.messages)
                        });
                    }
                    (t, trace)
                }
                Err(e) => {
                    t.fail(repro(), e.to_string());
                    (t, Trace::default())
                }
            }
        })
        .collect();
    let mut tally = Tally::default();
    let mut trace = Trace::default();
    for (t, tr) in per_run {
        tally = tally.merge(t);
        trace.merge(tr);
    }
    let mut notes = vec![format!(
        "{} simulated rounds, {} refined calls",
        trace.rounds, trace.refined_calls
    )];
    for c in Check::ALL {
        let checked = trace.checks_of(c);
        tally.check(
            runs == 0 || checked > 0,
            || format!("seed={seed}"),
            || format!("{c:?} was never exercised"),
        );
        notes.push(format!(
            "{c:?}: {checked} checks, {} violations",
            trace.violations_of(c)
        ));
    }
    let ablation = warm_start_ablation();
    notes.push(format!(
        "warm start off on {}: {} ledger inconsistencies",
        ablation.0, ablation.1
    ));
    tally = tally.merge(ablation.2);
    let (refined, refined_notes) = refined_conformance(opts)?;
    notes.extend(refined_notes);
    Ok((tally.merge(refined), notes))
}

/// An instance on which always restarting each simulated round from the box
/// corners (instead of the comparable earlier rounds) yields answers that
/// contradict an earlier round. Found by searching 7200 random instances.
pub const WARM_START_REGRESSION: (Family, [i64; 4], u64, usize) =
    (Family::RandomSteps, [5; 4], 212, 8);

/// Runs [`WARM_START_REGRESSION`] with and without warm starts. Both runs
/// must return a verified fixed point; only the cold run may break ledger
/// consistency, and it must.
pub fn warm_start_ablation() -> (String, u64, Tally) {
    let (family, sides, seed, steps) = WARM_START_REGRESSION;
    let repro = format!("{} num_steps={steps}", sampled_repro(family, &sides, seed));
    let mut t = Tally {
        instances: 1,
        ..Tally::default()
    };
    let spec = match InstanceSpec::sample(family, &sides, seed, steps) {
        Ok(s) => s,
        Err(e) => {
            t.fail(repro.clone(), e.to_string());
            return (repro, 0, t);
        }
    };
    let mut cold_violations = 0;
    for warm in [true, false] {
        match debug_run(&spec, SolverConfig::default().with_warm_start(warm)) {
            Ok((_, _, trace)) => {
                let v = trace.violations_of(Check::LedgerConsistency);
                if warm {
                    t.check(
                        v == 0,
                        || repro.clone(),
                        || format!("{v} inconsistencies with warm start"),
                    );
                } else {
                    cold_violations = v;
                    t.check(
                        v > 0,
                        || repro.clone(),
                        || "ledger stayed consistent without warm start".into(),
                    );
                }
            }
            Err(e) => t.fail(repro.clone(), format!("warm_start={warm}: {e}")),
        }
    }
    (repro, cold_violations, t)
}

/// Runs `solve_refined_star` with `solve`, counting the solver calls
/// independently, and checks the witness against fresh signs.
pub fn check_refined(
    o: &mut dyn SignOracle,
    solve: &StarSolver<'_>,
    repro: &dyn Fn() -> String,
) -> Tally {
    let mut t = Tally {
        instances: 1,
        ..Tally::default()
    };
    let calls = Cell::new(0u32);
    let counted = |o: &mut dyn SignOracle, ctx: &mut SolveContext| {
        calls.set(calls.get() + 1);
        solve(o, ctx)
    };
    let mut ctx = SolveContext::new(SolverConfig::default().with_debug_checks(false));
    let w = match solve_refined_star(o, &counted, &mut ctx) {
        Ok(w) => w,
        Err(e) => {
            t.fail(repro(), e.to_string());
            return t;
        }
    };
    let left = o.query(&w.p_left);
    let right = o.query(&w.p_right);
    let (left, right) = match (left, right) {
        (Ok(l), Ok(r)) => (l, r),
        _ => {
            t.fail(repro(), "witness lies outside the box".into());
            return t;
        }
    };
    t.check(w.conforms(&left, &right), repro, || {
        format!("witness {w:?} does not conform: signs {left} and {right}")
    });
    let k = w.p_left.dim();
    let cases = [
        left.get(k) == 1,
        right.get(k) == -1,
        left.get(k) == 0 && right.get(k) == 0,
    ];
    t.check(cases.iter().any(|&c| c), repro, || {
        format!("witness {w:?} meets none of the three cases")
    });
    t.check(
        calls.get() <= 2 && calls.get() == w.solver_calls,
        repro,
        || {
            format!(
                "{} solver calls, witness reports {}",
                calls.get(),
                w.solver_calls
            )
        },
    );
    t
}

fn refined_conformance(opts: &SuiteOptions) -> Result<(Tally, Vec<String>)> {
    let mut total = Tally::default();
    let mut notes = Vec::new();
    for n in 1..=5 {
        let dom = GridBox::cube(n, 1)?;
        let tables = enumerate_sign_tables(&dom, DEFAULT_COUNT_CAP)?;
        let count = tables.len();
        for (i, mut table) in tables.into_iter().enumerate() {
            let repro = || format!("valid 1-D sign table #{i} on [{n}]");
            total = total.merge(check_refined(&mut table, &solve_star_1d, &repro));
        }
        notes.push(format!("refined: {count} valid sign oracles on [{n}]"));
    }
    let count = opts.limit(1000);
    let t = sum_tallies((0..count).into_par_iter().map(|i| {
        let s = derive_seed(opts.seed, &[0x2d, i]);
        let (mut table, repro) = match random_2d_sign_table(s) {
            Ok(x) => x,
            Err(e) => {
                let mut t = Tally::default();
                t.fail(format!("random 2-D oracle seed={s}"), e.to_string());
                return t;
            }
        };
        check_refined(&mut table, &solve_star_2d, &|| repro.clone())
    }));
    notes.push(format!("refined: {} random 2-D oracles", t.instances));
    Ok((total.merge(t), notes))
}

/// A random valid 2-D sign oracle: either a hidden sign point or a slice of
/// a random-steps map on a small 3-D box. Returns the table and a
/// reproduction string.
pub fn random_2d_sign_table(seed: u64) -> Result<(SignTable, String)> {
    let mut rng = seeded(seed);
    let n = rng.gen_range(2..=12i64);
    if rng.gen_bool(0.25) {
        let spec = InstanceSpec::sample(Family::HiddenSignPoint, &[n, n], seed, 0)?;
        let map = spec.to_sign_map()?;
        let repro = sampled_repro(Family::HiddenSignPoint, &[n, n], seed);
        return Ok((SignTable::tabulate(map.as_ref()), repro));
    }
    let sides = [n, rng.gen_range(2..=12), rng.gen_range(2..=12)];
    let dim = rng.gen_range(0..3);
    let value = rng.gen_range(1..=sides[dim]);
    let steps = rng.gen_range(1..=12);
    let dom = GridBox::from_sides(&sides)?;
    let mut f = FnOracle::from_map(RandomSteps::generate(dom, seed, steps)?);
    let mut g = slice_oracle(&mut f, dim, value)?;
    let slice = g.domain().clone();
    let values = slice
        .iter()
        .map(|x| g.query(&x))
        .collect::<Result<Vec<_>>>()?;
    let repro = format!(
        "random_steps sides={sides:?} seed={seed} num_steps={steps}, sliced at dim {dim} = {value}"
    );
    Ok((SignTable::new(slice, values)?, repro))
}

fn check_star(
    o: &mut dyn SignOracle,
    sol: &Result<StarSolution>,
) -> std::result::Result<(), String> {
    match sol {
        Ok(s) => match o.query(&s.point) {
            Ok(g) if g == s.signs && g.is_uniform() => Ok(()),
            Ok(g) => Err(format!("{} has signs {g}", s.point)),
            Err(e) => Err(e.to_string()),
        },
        Err(e) => Err(e.to_string()),
    }
}

/// Runs both 2-D solvers on one table and checks both answers.
pub fn differential_check(table: &SignTable, repro: &dyn Fn() -> String) -> Tally {
    let mut t = Tally {
        instances: 1,
        ..Tally::default()
    };
    let mut ctx = SolveContext::new(SolverConfig::default().with_debug_checks(false));
    let mut o = table.clone();
    let fps = solve_star_2d_fps(&mut o, &mut ctx);
    let fps = check_star(&mut o, &fps);
    let stair = solve_star_2d_staircase(&mut o, &mut ctx);
    let stair = check_star(&mut o, &stair);
    t.check(fps.is_ok(), repro, || {
        format!("fps: {}", fps.clone().unwrap_err())
    });
    t.check(stair.is_ok(), repro, || {
        format!("staircase: {}", stair.clone().unwrap_err())
    });
    t
}

fn differential_2d(opts: &SuiteOptions) -> Result<(Tally, Vec<String>)> {
    let mut notes = Vec::new();
    let mut total = Tally::default();
    for sides in [[2i64, 2], [2, 3], [3, 2]] {
        let dom = GridBox::from_sides(&sides)?;
        let tables = enumerate_sign_tables(&dom, DEFAULT_COUNT_CAP)?;
        let count = tables.len();
        let limit = opts.limit(count as u64) as usize;
        let t = sum_tallies(tables[..limit].par_iter().enumerate().map(|(i, table)| {
            differential_check(table, &|| format!("valid sign table #{i} on {dom}"))
        }));
        notes.push(format!(
            "{dom}: {count} valid sign oracles, {} checked",
            t.instances
        ));
        total = total.merge(t);
    }
    let cube = GridBox::cube(3, 3)?;
    let corpus = SlicedSignCorpus::new(&cube, 10_000_000)?;
    let limit = opts.limit(corpus.len());
    let t = sum_tallies((0..limit).into_par_iter().map(|i| match corpus.get(i) {
        Some((d, v, table)) => differential_check(&table, &|| {
            format!("sliced corpus of {cube} entry #{i} (dim {d} = {v})")
        }),
        None => {
            let mut t = Tally::default();
            t.fail(format!("corpus entry #{i}"), "missing".into());
            t
        }
    }));
    notes.push(format!(
        "slices of monotone maps on {cube}: {} oracles, {} checked",
        corpus.len(),
        t.instances
    ));
    Ok((total.merge(t), notes))
}

pub fn ceil_log2(n: i64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - ((n - 1) as u64).leading_zeros() as u64
    }
}

/// Query budget of the 1-D solver on `n` points.
pub fn one_dim_budget(n: i64) -> u64 {
    ceil_log2(n) + 3
}

/// A random valid 1-D sign oracle on `[n]` with `n` up to `2^20`, and a
/// reproduction string.
pub fn random_1d_sign_oracle(seed: u64) -> Result<(Box<dyn SignOracle>, String)> {
    let mut rng = seeded(seed);
    let n = 1i64 << rng.gen_range(1..=20);
    let n = rng.gen_range(n / 2 + 1..=n);
    let kind = rng.gen_range(0..3);
    if kind == 0 {
        let spec = InstanceSpec::sample(Family::HiddenSignPoint, &[n], seed, 0)?;
        let repro = sampled_repro(Family::HiddenSignPoint, &[n], seed);
        return Ok((Box::new(NativeSignOracle::new(spec.to_sign_map()?)), repro));
    }
    let family = if kind == 1 {
        Family::RandomSteps
    } else {
        Family::CoupledPoint
    };
    let m = rng.gen_range(1..=n);
    let dim = rng.gen_range(0..2);
    let value = rng.gen_range(1..=m);
    let mut sides = [n, n];
    sides[dim] = m;
    let spec = InstanceSpec::sample(family, &sides, seed, 8)?;
    let repro = format!(
        "{}, sliced at dim {dim} = {value}",
        sampled_repro(family, &sides, seed)
    );
    Ok((
        Box::new(SlicedMap::new(FnOracle::new(spec.to_map()?), dim, value)?),
        repro,
    ))
}

/// Owns a map and exposes one of its slices as a sign oracle.
struct SlicedMap {
    f: FnOracle,
    dim: usize,
    value: i64,
    domain: GridBox,
}

impl SlicedMap {
    fn new(f: FnOracle, dim: usize, value: i64) -> Result<Self> {
        let domain = f.domain().without(dim)?;
        Ok(SlicedMap {
            f,
            dim,
            value,
            domain,
        })
    }
}

impl SignOracle for SlicedMap {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn label(&self) -> &'static str {
        "slice"
    }
    fn query_labeled(
        &mut self,
        x: &Point,
        label: &'static str,
    ) -> Result<crate::lattice::SignVector> {
        slice_oracle(&mut self.f, self.dim, self.value)?.query_labeled(x, label)
    }
}

/// Counts the distinct points a solver asks for.
struct Distinct<'a> {
    inner: &'a mut dyn SignOracle,
    seen: std::collections::HashSet<Point>,
}

impl SignOracle for Distinct<'_> {
    fn domain(&self) -> &GridBox {
        self.inner.domain()
    }
    fn label(&self) -> &'static str {
        self.inner.label()
    }
    fn query_labeled(
        &mut self,
        x: &Point,
        label: &'static str,
    ) -> Result<crate::lattice::SignVector> {
        self.seen.insert(x.clone());
        self.inner.query_labeled(x, label)
    }
}

/// Runs `solve` and returns its answer with the number of distinct points
/// it queried.
pub fn count_distinct(
    o: &mut dyn SignOracle,
    solve: &StarSolver<'_>,
    config: SolverConfig,
) -> Result<(StarSolution, u64)> {
    let mut d = Distinct {
        inner: o,
        seen: Default::default(),
    };
    let sol = solve(&mut d, &mut SolveContext::new(config))?;
    Ok((sol, d.seen.len() as u64))
}

/// Side exponents and seeds of the 2-D budget measurement.
pub const FPS_EXPONENTS: std::ops::RangeInclusive<u32> = 4..=16;
pub const FPS_SEEDS_PER_N: u64 = 100;
/// Allowed spread of `queries / (log2 n + 1)` around its median over the
/// top half of the grid.
pub const FPS_FLATNESS_TOLERANCE: f64 = 0.20;

#[derive(Clone, Debug, Serialize)]
pub struct FpsRow {
    pub n: i64,
    pub max_queries: u64,
    pub ratio: f64,
}

/// Worst distinct-query count of the fps solver on hidden sign points in
/// `[n]^2`, for each `n = 2^e` in [`FPS_EXPONENTS`].
pub fn fps_query_maxima(seed: u64, seeds_per_n: u64) -> Result<Vec<FpsRow>> {
    FPS_EXPONENTS
        .map(|e| {
            let n = 1i64 << e;
            let max = (0..seeds_per_n)
                .into_par_iter()
                .map(|s| {
                    let spec = InstanceSpec::sample(
                        Family::HiddenSignPoint,
                        &[n, n],
                        derive_seed(seed, &[n as u64, s]),
                        0,
                    )?;
                    let mut o = NativeSignOracle::new(spec.to_sign_map()?);
                    let sol = solve_star_2d_fps(&mut o, &mut SolveContext::default())?;
                    if !o.fresh_eval(&sol.point).is_uniform() {
                        return Err(TarskiError::Contract(format!("fps returned {}", sol.point)));
                    }
                    Ok(o.stats().budget_queries)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            Ok(FpsRow {
                n,
                max_queries: max,
                ratio: max as f64 / (e as f64 + 1.0),
            })
        })
        .collect()
}

/// Whether every ratio in the top half of `rows` is within `tol` of their
/// median.
pub fn flat_top_half(rows: &[FpsRow], tol: f64) -> bool {
    let top = &rows[rows.len() / 2..];
    let mut ratios: Vec<f64> = top.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let mid = ratios[ratios.len() / 2];
    ratios.iter().all(|r| (r - mid).abs() <= tol * mid)
}

fn budgets(opts: &SuiteOptions) -> Result<(Tally, Vec<String>)> {
    let mut total = Tally::default();
    let mut notes = Vec::new();
    let config = SolverConfig::default().with_debug_checks(false);
    for n in 1..=6 {
        let tables = enumerate_sign_tables(&GridBox::cube(n, 1)?, DEFAULT_COUNT_CAP)?;
        let count = tables.len();
        for (i, mut table) in tables.into_iter().enumerate() {
            let repro = || format!("valid 1-D sign table #{i} on [{n}]");
            total.instances += 1;
            match count_distinct(&mut table, &solve_star_1d, config) {
                Ok((_, q)) => total.check(q <= one_dim_budget(n), repro, || {
                    format!("{q} queries on [{n}] exceed {}", one_dim_budget(n))
                }),
                Err(e) => total.fail(repro(), e.to_string()),
            }
        }
        notes.push(format!("1-D: {count} valid sign oracles on [{n}]"));
    }
    let count = opts.limit(1000);
    let worst = std::sync::atomic::AtomicU64::new(0);
    let t = sum_tallies((0..count).into_par_iter().map(|i| {
        let s = derive_seed(opts.seed, &[0x1d, i]);
        let mut t = Tally {
            instances: 1,
            ..Tally::default()
        };
        let (mut o, repro) = match random_1d_sign_oracle(s) {
            Ok(x) => x,
            Err(e) => {
                t.fail(format!("random 1-D oracle seed={s}"), e.to_string());
                return t;
            }
        };
        let n = o.domain().side(0);
        match count_distinct(o.as_mut(), &solve_star_1d, config) {
            Ok((sol, q)) => {
                worst.fetch_max(q, std::sync::atomic::Ordering::Relaxed);
                t.check(
                    q <= one_dim_budget(n),
                    || repro.clone(),
                    || format!("{q} queries on [{n}] exceed {}", one_dim_budget(n)),
                );
                t.check(
                    sol.signs.is_uniform(),
                    || repro.clone(),
                    || format!("{} is not a solution", sol.point),
                );
            }
            Err(e) => t.fail(repro.clone(), e.to_string()),
        }
        t
    }));
    notes.push(format!(
        "1-D: {} random oracles up to n = 2^20, worst {} queries",
        t.instances,
        worst.into_inner()
    ));
    total = total.merge(t);

    let rows = fps_query_maxima(opts.seed, opts.limit(FPS_SEEDS_PER_N))?;
    for r in &rows {
        total.instances += opts.limit(FPS_SEEDS_PER_N);
        let bound = FPS_BUDGET_CONSTANT * (ceil_log2(r.n) as f64 + 1.0);
        total.check(
            r.max_queries as f64 <= bound,
            || sampled_repro(Family::HiddenSignPoint, &[r.n, r.n], opts.seed),
            || {
                format!(
                    "fps used {} queries at n = {}, budget {bound}",
                    r.max_queries, r.n
                )
            },
        );
        notes.push(format!(
            "fps n = {:>6}: max {:>3} queries, ratio {:.3}",
            r.n, r.max_queries, r.ratio
        ));
    }
    total.check(
        flat_top_half(&rows, FPS_FLATNESS_TOLERANCE),
        || format!("fps maxima seed={}", opts.seed),
        || "queries / (log2 n + 1) is not flat over the top half".into(),
    );
    notes.push(format!("fps budget constant {FPS_BUDGET_CONSTANT}"));
    Ok((total, notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn capped_suites_pass() {
        let opts = SuiteOptions {
            seed: 3,
            cap: Some(40),
        };
        for s in [
            Suite::ExhaustiveSmall,
            Suite::Random,
            Suite::Invariants,
            Suite::Differential2d,
        ] {
            let r = run_suite(s, &opts).unwrap();
            assert!(r.passed(), "{r}");
            assert!(r.tally.assertions > 0);
        }
    }

    #[test]
    fn failures_keep_the_first_repro() {
        let mut a = Tally::default();
        a.check(false, || "first".into(), || "m1".into());
        let mut b = Tally::default();
        b.check(false, || "second".into(), || "m2".into());
        let t = a.merge(b);
        assert_eq!(t.failures, 2);
        assert_eq!(t.first_failure.unwrap().repro, "first");
    }
}
