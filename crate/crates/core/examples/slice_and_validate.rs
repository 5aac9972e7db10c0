//! Turns a monotone map into sign oracles by slicing, validates them, and
//! shows what a broken map looks like.

use tarski_core::instances::{gen_hidden_point, parse_instance};
use tarski_core::oracle::{slice_oracle, validate, SignOracle, ValidationMode};
use tarski_core::{GridBox, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut f = gen_hidden_point(GridBox::cube(3, 3)?, Point::from([2, 2, 2]))?;
    let mut g = slice_oracle(&mut f, 2, 2)?;
    for x in [
        Point::from([1, 1]),
        Point::from([3, 3]),
        Point::from([2, 2]),
    ] {
        println!("g{x} = {}", g.query(&x)?);
    }
    let report = validate(&mut g, ValidationMode::exhaustive())?;
    println!(
        "slice valid: {} ({} points, {} pairs)",
        report.is_ok(),
        report.points_checked,
        report.pairs_checked
    );

    let doc = r#"{"kind":"explicit_table","sides":[2],"values":[[2],[1]]}"#;
    match parse_instance(doc) {
        Ok(_) => println!("accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
