use crate::error::{Result, TarskiError};
use crate::lattice::{Point, SignVector};
use crate::oracle::SignOracle;

use super::{try_point, SolveContext, StarSolution};

/// Bisection on the first sign. The range condition gives `g(lo)_1 >= 0`
/// and `g(hi)_1 <= 0`, and the bracket `[l, r]` keeps those signs. Ties at
/// the end go to the lower endpoint.
pub fn solve_star_1d(o: &mut dyn SignOracle, _ctx: &mut SolveContext) -> Result<StarSolution> {
    let b = o.domain().clone();
    if b.dim() != 1 {
        return Err(TarskiError::DimensionMismatch {
            expected: 1,
            found: b.dim(),
        });
    }
    let (mut l, mut r) = (b.lo()[0], b.hi()[0]);
    while r - l > 1 {
        let m = (l + r).div_euclid(2);
        let x = Point::new(vec![m]);
        let g = o.query(&x)?;
        if let Some(sol) = StarSolution::from_signs(x.clone(), g.clone()) {
            return Ok(sol);
        }
        match g.get(0) {
            1 => l = m,
            -1 => r = m,
            _ => {
                return Err(TarskiError::invalid(format!(
                    "g{x} = {g} is mixed although its first sign is 0"
                )))
            }
        }
    }
    if let Some(sol) = try_point(o, &Point::new(vec![l]))? {
        return Ok(sol);
    }
    if r != l {
        if let Some(sol) = try_point(o, &Point::new(vec![r]))? {
            return Ok(sol);
        }
    }
    Err(TarskiError::invalid(format!(
        "no uniform point at the bracket ends {l} and {r}; the oracle breaks the monotone condition"
    )))
}

/// Finds a column `c ∈ [cl, cr]` with `g((c, y))_1 = 0`, given
/// `g((cl, y))_1 >= 0` and `g((cr, y))_1 <= 0`.
pub fn bracketed_zero_in_row(
    o: &mut dyn SignOracle,
    y: i64,
    cl: i64,
    cr: i64,
) -> Result<(i64, SignVector)> {
    if o.domain().dim() != 2 {
        return Err(TarskiError::DimensionMismatch {
            expected: 2,
            found: o.domain().dim(),
        });
    }
    if cl > cr {
        return Err(TarskiError::usage(format!(
            "empty column range {cl}..={cr}"
        )));
    }
    let at = |c: i64| Point::new(vec![c, y]);
    let (mut l, mut r) = (cl, cr);
    while r - l > 1 {
        let m = (l + r).div_euclid(2);
        let g = o.query(&at(m))?;
        match g.get(0) {
            0 => return Ok((m, g)),
            1 => l = m,
            _ => r = m,
        }
    }
    for c in [l, r] {
        let g = o.query(&at(c))?;
        if g.get(0) == 0 {
            return Ok((c, g));
        }
    }
    Err(TarskiError::invalid(format!(
        "row {y}: no zero of the first sign between columns {l} and {r}"
    )))
}
