//! Benchmark sweeps: one record per (n, rep, algorithm) cell, CSV output,
//! and a scaling summary.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TarskiError};
use crate::instances::{Family, Instance, InstanceSpec};
use crate::outer::{solve_tarski, solve_tarski_brute, solve_tarski_dqy, verify_fixed_point};
use crate::rng::derive_seed;
use crate::star::{solve_star, Base2d, SolveContext, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Slicing plus the sign-oracle decomposition.
    New,
    /// Coordinate-recursive bisection.
    Dqy,
    Brute,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::New => "new",
            Algorithm::Dqy => "dqy",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = TarskiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Algorithm::New),
            "dqy" => Ok(Algorithm::Dqy),
            "brute" => Ok(Algorithm::Brute),
            _ => Err(TarskiError::usage(format!(
                "unknown algorithm {s:?} (expected new, dqy or brute)"
            ))),
        }
    }
}

/// Parses a comma-separated algorithm list.
pub fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>> {
    s.split(',').map(|a| a.trim().parse()).collect()
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub family: String,
    pub sides: String,
    pub k: usize,
    pub algorithm: String,
    pub base2d_config: String,
    pub distinct_queries: u64,
    pub total_queries: u64,
    pub rounds: u64,
    pub valid: bool,
    pub wall_time_ns: u64,
    pub seed: u64,
}

/// Side lengths: `LO..HI` (doubling), `LO..HIxSTEP` (multiplying by STEP),
/// or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<i64>> {
    let bad = || TarskiError::usage(format!("bad n-grid {s:?}"));
    let grid: Vec<i64> = if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once('x') {
            Some((hi, step)) => (hi, step.parse::<i64>().map_err(|_| bad())?),
            None => (rest, 2),
        };
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        if lo < 1 || hi < lo || step < 2 {
            return Err(bad());
        }
        std::iter::successors(Some(lo), |&n| n.checked_mul(step))
            .take_while(|&n| n <= hi)
            .collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|&n| n < 1) {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: Family,
    pub k: usize,
    pub grid: Vec<i64>,
    pub reps: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub base2d: Base2d,
    pub num_steps: usize,
    pub debug_checks: bool,
}

impl BenchConfig {
    pub fn new(family: Family, k: usize, grid: Vec<i64>) -> Self {
        BenchConfig {
            family,
            k,
            grid,
            reps: 1,
            seed: 0,
            algorithms: vec![Algorithm::New],
            base2d: Base2d::Fps,
            num_steps: 8,
            debug_checks: false,
        }
    }
}

fn sides_label(sides: &[i64]) -> String {
    sides
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

/// Runs one algorithm on one instance and re-verifies the answer.
pub fn run_cell(
    spec: &InstanceSpec,
    algorithm: Algorithm,
    config: SolverConfig,
) -> Result<(BenchRecord, crate::star::Trace)> {
    let sides = spec.sides().to_vec();
    let mut ctx = SolveContext::new(config);
    let start = Instant::now();
    let (distinct, total, rounds, valid) = match spec.instantiate()? {
        Instance::Map(mut f) => {
            let res = match algorithm {
                Algorithm::New => solve_tarski(&mut f, &mut ctx)?,
                Algorithm::Dqy => solve_tarski_dqy(&mut f)?,
                Algorithm::Brute => solve_tarski_brute(&mut f)?,
            };
            let valid = verify_fixed_point(&f, &res.point);
            (
                res.stats.budget_queries,
                res.stats.total_queries,
                res.rounds,
                valid,
            )
        }
        Instance::Sign(mut o) => {
            if algorithm != Algorithm::New {
                return Err(TarskiError::usage(format!(
                    "{} only applies to maps; {} is a sign-oracle family",
                    algorithm,
                    spec.kind()
                )));
            }
            let sol = solve_star(&mut o, &mut ctx)?;
            let valid = o.fresh_eval(&sol.point).is_uniform();
            let stats = o.stats();
            (
                stats.budget_queries,
                stats.total_queries,
                ctx.trace.rounds,
                valid,
            )
        }
    };
    let wall = start.elapsed().as_nanos() as u64;
    let record = BenchRecord {
        instance_id: String::new(),
        family: spec.kind().to_string(),
        sides: sides_label(&sides),
        k: sides.len(),
        algorithm: algorithm.name().to_string(),
        base2d_config: config.base2d.name().to_string(),
        distinct_queries: distinct,
        total_queries: total,
        rounds,
        valid,
        wall_time_ns: wall,
        seed: 0,
    };
    Ok((record, ctx.trace))
}

/// Seed of repetition `rep` at side length `n`.
pub fn cell_seed(base: u64, n: i64, rep: usize) -> u64 {
    derive_seed(base, &[n as u64, rep as u64])
}

/// Runs every cell (in parallel) and returns the records in `(n, rep,
/// algorithm)` order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.k == 0 {
        return Err(TarskiError::usage("k must be at least 1"));
    }
    let config = SolverConfig::default()
        .with_base2d(cfg.base2d)
        .with_debug_checks(cfg.debug_checks);
    let cells: Vec<(i64, usize)> = cfg
        .grid
        .iter()
        .flat_map(|&n| (0..cfg.reps).map(move |rep| (n, rep)))
        .collect();
    let per_cell: Vec<Result<Vec<BenchRecord>>> = cells
        .par_iter()
        .map(|&(n, rep)| {
            let seed = cell_seed(cfg.seed, n, rep);
            let spec = InstanceSpec::sample(cfg.family, &vec![n; cfg.k], seed, cfg.num_steps)?;
            cfg.algorithms
                .iter()
                .map(|&algo| {
                    let (mut rec, _) = run_cell(&spec, algo, config).map_err(|e| {
                        TarskiError::invalid(format!(
                            "{} failed on family={} sides={} seed={seed}: {e}",
                            algo,
                            cfg.family,
                            sides_label(&vec![n; cfg.k])
                        ))
                    })?;
                    rec.instance_id = format!("{}-n{}-k{}-r{}", cfg.family, n, cfg.k, rep);
                    rec.seed = seed;
                    Ok(rec)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(cells.len() * cfg.algorithms.len());
    for cell in per_cell {
        out.extend(cell?);
    }
    Ok(out)
}

/// Writes records as CSV (header always present, LF line endings).
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "instance_id",
        "family",
        "sides",
        "k",
        "algorithm",
        "base2d_config",
        "distinct_queries",
        "total_queries",
        "rounds",
        "valid",
        "wall_time_ns",
        "seed",
    ])?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(TarskiError::from))
        .collect()
}

/// Exponents tried when reporting `max / (log₂ n)^e`.
pub const EXPONENTS: [u32; 4] = [1, 2, 3, 4];

/// Relative slack allowed between consecutive ratios when deciding that a
/// sequence is non-increasing.
pub const RATIO_TOLERANCE: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: i64,
    pub max: u64,
    pub median: f64,
    /// `max / (log₂ n)^e` for each of [`EXPONENTS`].
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub base2d_config: String,
    pub rows: Vec<ScalingRow>,
    /// Smallest exponent whose ratio is non-increasing over the top half of
    /// the grid.
    pub exponent: Option<u32>,
}

/// `values[j+1] <= values[j] * (1 + tol)` for all consecutive pairs.
pub fn non_increasing(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
}

pub fn median(values: &mut [u64]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    match n {
        0 => 0.0,
        _ if n % 2 == 1 => values[n / 2] as f64,
        _ => (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0,
    }
}

fn side_of(record: &BenchRecord) -> i64 {
    record
        .sides
        .split('x')
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Groups records by algorithm and n. Only `n >= 2` rows get ratios.
pub fn summarize(records: &[BenchRecord]) -> Vec<AlgorithmSummary> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in records {
        let key = (r.algorithm.clone(), r.base2d_config.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(algorithm, base2d_config)| {
            let mine: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.algorithm == algorithm && r.base2d_config == base2d_config)
                .collect();
            let mut ns: Vec<i64> = mine.iter().map(|r| side_of(r)).collect();
            ns.sort_unstable();
            ns.dedup();
            let rows: Vec<ScalingRow> = ns
                .iter()
                .map(|&n| {
                    let mut q: Vec<u64> = mine
                        .iter()
                        .filter(|r| side_of(r) == n)
                        .map(|r| r.distinct_queries)
                        .collect();
                    let med = median(&mut q);
                    let max = q.iter().copied().max().unwrap_or(0);
                    let log = (n as f64).log2();
                    let ratios = EXPONENTS
                        .iter()
                        .map(|&e| {
                            if n >= 2 {
                                max as f64 / log.powi(e as i32)
                            } else {
                                f64::NAN
                            }
                        })
                        .collect();
                    ScalingRow {
                        n,
                        max,
                        median: med,
                        ratios,
                    }
                })
                .collect();
            let top = &rows[rows.len() / 2..];
            let exponent = EXPONENTS.iter().enumerate().find_map(|(ei, &e)| {
                let seq: Vec<f64> = top.iter().map(|r| r.ratios[ei]).collect();
                (seq.len() >= 2
                    && seq.iter().all(|v| v.is_finite())
                    && non_increasing(&seq, RATIO_TOLERANCE))
                .then_some(e)
            });
            AlgorithmSummary {
                algorithm,
                base2d_config,
                rows,
                exponent,
            }
        })
        .collect()
}

impl fmt::Display for AlgorithmSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "algorithm={} base2d={}",
            self.algorithm, self.base2d_config
        )?;
        writeln!(
            f,
            "{:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "n", "max", "median", "/log", "/log^2", "/log^3", "/log^4"
        )?;
        for r in &self.rows {
            write!(f, "{:>8} {:>10} {:>10.1}", r.n, r.max, r.median)?;
            for v in &r.ratios {
                write!(f, " {v:>10.3}")?;
            }
            writeln!(f)?;
        }
        match self.exponent {
            Some(e) => writeln!(f, "smallest non-increasing exponent over the top half: {e}"),
            None => writeln!(f, "no exponent up to 4 is non-increasing over the top half"),
        }
    }
}
