pub mod bench;
pub mod commands;
pub mod error;
pub mod instances;
pub mod lattice;
pub mod oracle;
pub mod outer;
pub mod rng;
pub mod star;
pub mod verify;

pub use error::{Result, TarskiError};
pub use lattice::{enumerate_box, glb, leq, lub, sgn, GridBox, Point, SignVector};
