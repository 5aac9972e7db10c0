//! Enumerates every monotone self-map of a small box and checks the solver
//! against the full fixed-point set of each.
//!
//! ```text
//! cargo run --release --example enumerate_small -- [sides, e.g. 3,3]
//! ```

use tarski_core::instances::{enumerate_monotone_maps, DEFAULT_COUNT_CAP};
use tarski_core::oracle::{FnOracle, GridMap};
use tarski_core::outer::solve_tarski;
use tarski_core::star::{SolveContext, SolverConfig};
use tarski_core::GridBox;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "2,2".into());
    let sides = arg
        .split(',')
        .map(str::parse)
        .collect::<Result<Vec<i64>, _>>()?;
    let dom = GridBox::from_sides(&sides)?;
    let maps = enumerate_monotone_maps(&dom, DEFAULT_COUNT_CAP)?;
    println!(
        "{} monotone self-maps of {dom}, per coordinate {:?}",
        maps.len(),
        maps.per_coordinate_counts()
    );

    let mut histogram = std::collections::BTreeMap::new();
    for m in maps {
        let fixed: Vec<_> = dom.iter().filter(|x| &m.apply(x) == x).collect();
        let mut f = FnOracle::from_map(m);
        let res = solve_tarski(&mut f, &mut SolveContext::new(SolverConfig::default()))?;
        assert!(fixed.contains(&res.point));
        *histogram.entry(fixed.len()).or_insert(0) += 1;
    }
    for (count, maps) in histogram {
        println!("{maps:>6} maps have {count} fixed points");
    }
    Ok(())
}
