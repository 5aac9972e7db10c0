//! The `tarski` command line: argument parsing and the four subcommands.
//!
//! Every command writes its report to the given streams and returns the
//! process exit code, so the binary is a one-line wrapper.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bench::{
    parse_algorithms, parse_grid, run_bench, summarize, write_csv, Algorithm, BenchConfig,
};
use crate::error::{Result, TarskiError};
use crate::instances::{
    enumerate_monotone_maps, load_instance, serialize_instance, Family, Instance, InstanceSpec,
    DEFAULT_COUNT_CAP,
};
use crate::lattice::GridBox;
use crate::outer::{solve_tarski, solve_tarski_brute, solve_tarski_dqy, verify_fixed_point};
use crate::star::{debug_checks_from_env, solve_star, Base2d, SolveContext, SolverConfig};
use crate::verify::{run_suite, Suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
/// A run finished but its result did not verify, or a suite failed.
pub const EXIT_FAILED: i32 = 1;
/// Bad arguments or unreadable input.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "tarski",
    version,
    about = "Fixed points of monotone maps on integer grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one instance document.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "new")]
        algo: Algorithm,
        #[arg(long, default_value = "fps")]
        base2d: Base2d,
    },
    /// Run a benchmark sweep and write one CSV row per run.
    Bench {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        k: usize,
        /// `LO..HI` (powers of two), `LO..HIxSTEP` (geometric) or a comma list.
        #[arg(long)]
        n_grid: String,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "new,dqy")]
        algos: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "fps")]
        base2d: Base2d,
        /// Steps per coordinate for the random_steps family.
        #[arg(long, default_value_t = 8)]
        num_steps: usize,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Limit on the instances each part of the suite runs.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Write every monotone self-map of a small box as an instance document.
    Enumerate {
        /// Comma-separated side lengths, e.g. `2,2`.
        #[arg(long)]
        sides: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_COUNT_CAP)]
        cap: u64,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Solve {
            instance,
            algo,
            base2d,
        } => cmd_solve(&instance, algo, base2d, out),
        Command::Bench {
            family,
            k,
            n_grid,
            reps,
            seed,
            algos,
            out: path,
            base2d,
            num_steps,
        } => parse_grid(&n_grid).and_then(|grid| {
            let mut cfg = BenchConfig::new(family, k, grid);
            cfg.reps = reps;
            cfg.seed = seed;
            cfg.algorithms = parse_algorithms(&algos)?;
            cfg.base2d = base2d;
            cfg.num_steps = num_steps;
            cfg.debug_checks = debug_checks_from_env();
            cmd_bench(&cfg, &path, out)
        }),
        Command::Verify { suite, seed, cap } => cmd_verify(suite, &SuiteOptions { seed, cap }, out),
        Command::Enumerate {
            sides,
            out: dir,
            cap,
        } => cmd_enumerate(&sides, &dir, cap, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_solve(path: &Path, algo: Algorithm, base2d: Base2d, out: &mut dyn Write) -> Result<i32> {
    let spec = load_instance(path)?;
    let config = SolverConfig::default().with_base2d(base2d);
    let mut ctx = SolveContext::new(config);
    let verified = match spec.instantiate()? {
        Instance::Map(mut f) => {
            let res = match algo {
                Algorithm::New => solve_tarski(&mut f, &mut ctx)?,
                Algorithm::Dqy => solve_tarski_dqy(&mut f)?,
                Algorithm::Brute => solve_tarski_brute(&mut f)?,
            };
            let ok = verify_fixed_point(&f, &res.point);
            writeln!(out, "fixed point: {}", res.point)?;
            writeln!(out, "rounds: {}", res.rounds)?;
            writeln!(
                out,
                "queries: {} distinct, {} total, {} debug",
                res.stats.budget_queries, res.stats.total_queries, res.stats.debug_queries
            )?;
            ok
        }
        Instance::Sign(mut o) => {
            if algo != Algorithm::New {
                return Err(TarskiError::usage(format!(
                    "{algo} solves maps; {} is a sign-oracle instance",
                    spec.kind()
                )));
            }
            let sol = solve_star(&mut o, &mut ctx)?;
            let fresh = o.fresh_eval(&sol.point);
            writeln!(
                out,
                "solution: {} with signs {} ({:?})",
                sol.point, sol.signs, sol.polarity
            )?;
            let stats = o.stats();
            writeln!(
                out,
                "queries: {} distinct, {} total, {} debug",
                stats.budget_queries, stats.total_queries, stats.debug_queries
            )?;
            fresh == sol.signs && fresh.is_uniform()
        }
    };
    writeln!(out, "verified: {}", if verified { "yes" } else { "no" })?;
    Ok(if verified { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_bench(cfg: &BenchConfig, path: &Path, out: &mut dyn Write) -> Result<i32> {
    let records = run_bench(cfg)?;
    let file = std::fs::File::create(path)?;
    write_csv(&records, std::io::BufWriter::new(file))?;
    let invalid = records.iter().filter(|r| !r.valid).count();
    writeln!(out, "{} runs written to {}", records.len(), path.display())?;
    for s in summarize(&records) {
        writeln!(out, "{s}")?;
    }
    if invalid > 0 {
        writeln!(out, "{invalid} runs returned an unverified point")?;
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(suite: Suite, opts: &SuiteOptions, out: &mut dyn Write) -> Result<i32> {
    let report = run_suite(suite, opts)?;
    writeln!(out, "{report}")?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

#[derive(Serialize)]
struct EnumerationIndex {
    sides: Vec<i64>,
    count: usize,
    files: Vec<String>,
}

/// File listing the documents written by `enumerate`.
pub const INDEX_FILE: &str = "index.json";

pub fn cmd_enumerate(sides: &str, dir: &Path, cap: u64, out: &mut dyn Write) -> Result<i32> {
    let sides: Vec<i64> = sides
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| TarskiError::usage(format!("bad side length {s:?}")))
        })
        .collect::<Result<_>>()?;
    let dom = GridBox::from_sides(&sides)?;
    let maps = enumerate_monotone_maps(&dom, cap)?;
    std::fs::create_dir_all(dir)?;
    let width = maps.len().max(1).to_string().len();
    let mut files = Vec::with_capacity(maps.len());
    for (i, m) in maps.enumerate() {
        let name = format!("map-{i:0width$}.json");
        std::fs::write(
            dir.join(&name),
            serialize_instance(&InstanceSpec::from_map_table(&m)),
        )?;
        files.push(name);
    }
    let index = EnumerationIndex {
        sides,
        count: files.len(),
        files,
    };
    std::fs::write(dir.join(INDEX_FILE), serde_json::to_string_pretty(&index)?)?;
    writeln!(
        out,
        "{} instances written to {}",
        index.count,
        dir.display()
    )?;
    Ok(EXIT_OK)
}
