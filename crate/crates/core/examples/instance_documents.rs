//! Writes instance documents for each family, reads them back and solves
//! them.

use tarski_core::instances::{parse_instance, serialize_instance, Family, Instance, InstanceSpec};
use tarski_core::outer::solve_tarski;
use tarski_core::star::{solve_star, SolveContext};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for family in Family::ALL {
        let spec = InstanceSpec::sample(family, &[8, 8, 8], 42, 4)?;
        let doc = serialize_instance(&spec);
        let back = parse_instance(&doc)?;
        let answer = match back.instantiate()? {
            Instance::Map(mut f) => solve_tarski(&mut f, &mut SolveContext::default())?.point,
            Instance::Sign(mut o) => solve_star(&mut o, &mut SolveContext::default())?.point,
        };
        println!("{doc}\n  -> {answer}");
    }
    Ok(())
}
