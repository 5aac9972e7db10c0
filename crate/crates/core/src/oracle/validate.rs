use std::fmt;

use crate::error::{Result, TarskiError};
use crate::lattice::{GridBox, Point, SignVector};
use rand::Rng as _;

use crate::rng::{seeded, Rng};

use super::{GridMap, SignOracle};

pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub enum ValidationMode {
    /// Every point and every neighbour pair `(x, x + e_i)`.
    Exhaustive { cap: u64 },
    /// Random comparable pairs drawn from a seeded generator.
    Sampled { count: usize, seed: u64 },
}

impl ValidationMode {
    pub fn exhaustive() -> Self {
        ValidationMode::Exhaustive {
            cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Arity {
        point: Point,
        len: usize,
        expected: usize,
    },
    /// `x_i + g(x)_i` leaves `[lo_i, hi_i]`; `coord` is 1-based.
    Range {
        point: Point,
        coord: usize,
        sign: i8,
    },
    /// `(x,0)+g(x) ⪯ (y,0)+g(y)` fails in output `output` (1-based).
    Monotone {
        lower: Point,
        upper: Point,
        output: usize,
    },
    NotSelfMap {
        point: Point,
        image: Point,
    },
    MapMonotone {
        lower: Point,
        upper: Point,
        lower_image: Point,
        upper_image: Point,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity { point, len, expected } => {
                write!(f, "g{point} has {len} signs, expected {expected}")
            }
            Violation::Range { point, coord, sign } => write!(
                f,
                "range violated at {point}: coordinate {coord} moved by {sign} leaves the box"
            ),
            Violation::Monotone { lower, upper, output } => write!(
                f,
                "monotonicity violated at {lower} <= {upper} in output {output}"
            ),
            Violation::NotSelfMap { point, image } => {
                write!(f, "f{point} = {image} leaves the box")
            }
            Violation::MapMonotone { lower, upper, lower_image, upper_image } => write!(
                f,
                "monotonicity violated at {lower} <= {upper}: f{lower} = {lower_image} is not <= f{upper} = {upper_image}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub points_checked: u64,
    pub pairs_checked: u64,
    pub violation: Option<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }

    pub fn into_result(self) -> Result<ValidationReport> {
        match &self.violation {
            None => Ok(self),
            Some(v) => Err(TarskiError::invalid(v.to_string())),
        }
    }
}

fn range_violation(b: &GridBox, x: &Point, g: &SignVector) -> Option<Violation> {
    let k = b.dim();
    if g.len() != k + 1 {
        return Some(Violation::Arity {
            point: x.clone(),
            len: g.len(),
            expected: k + 1,
        });
    }
    (0..k)
        .find(|&i| {
            let moved = x[i] + g.get(i) as i64;
            moved < b.lo()[i] || moved > b.hi()[i]
        })
        .map(|i| Violation::Range {
            point: x.clone(),
            coord: i + 1,
            sign: g.get(i),
        })
}

fn monotone_violation(x: &Point, gx: &SignVector, y: &Point, gy: &SignVector) -> Option<Violation> {
    let k = x.dim();
    (0..=k)
        .find(|&t| {
            let (ax, ay) = if t < k { (x[t], y[t]) } else { (0, 0) };
            ax + gx.get(t) as i64 > ay + gy.get(t) as i64
        })
        .map(|t| Violation::Monotone {
            lower: x.clone(),
            upper: y.clone(),
            output: t + 1,
        })
}

fn check_cap(b: &GridBox, cap: u64) -> Result<u64> {
    match b.volume() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(TarskiError::usage(format!(
            "exhaustive validation of {b} exceeds the cap of {cap} points"
        ))),
    }
}

/// Checks both sign-oracle conditions. Violations are report content, not
/// errors; errors only come from the oracle itself or a cap overflow.
pub fn validate(o: &mut dyn SignOracle, mode: ValidationMode) -> Result<ValidationReport> {
    let b = o.domain().clone();
    let mut report = ValidationReport::default();
    match mode {
        ValidationMode::Exhaustive { cap } => {
            let volume = check_cap(&b, cap)?;
            let mut values = Vec::with_capacity(volume as usize);
            for x in b.iter() {
                let g = o.query_labeled(&x, "validate")?;
                report.points_checked += 1;
                if let Some(v) = range_violation(&b, &x, &g) {
                    report.violation = Some(v);
                    return Ok(report);
                }
                values.push(g);
            }
            for x in b.iter() {
                let gx = &values[b.index_of(&x) as usize];
                for i in 0..b.dim() {
                    if x[i] == b.hi()[i] {
                        continue;
                    }
                    let y = x.with(i, x[i] + 1);
                    let gy = &values[b.index_of(&y) as usize];
                    report.pairs_checked += 1;
                    if let Some(v) = monotone_violation(&x, gx, &y, gy) {
                        report.violation = Some(v);
                        return Ok(report);
                    }
                }
            }
        }
        ValidationMode::Sampled { count, seed } => {
            let mut rng = seeded(seed);
            for _ in 0..count {
                let (x, y) = comparable_pair(&b, &mut rng);
                let gx = o.query_labeled(&x, "validate")?;
                let gy = o.query_labeled(&y, "validate")?;
                report.points_checked += 2;
                report.pairs_checked += 1;
                let v = range_violation(&b, &x, &gx)
                    .or_else(|| range_violation(&b, &y, &gy))
                    .or_else(|| monotone_violation(&x, &gx, &y, &gy));
                if v.is_some() {
                    report.violation = v;
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

fn comparable_pair(b: &GridBox, rng: &mut Rng) -> (Point, Point) {
    let x: Vec<i64> = (0..b.dim())
        .map(|i| rng.gen_range(b.lo()[i]..=b.hi()[i]))
        .collect();
    let y: Vec<i64> = (0..b.dim())
        .map(|i| rng.gen_range(x[i]..=b.hi()[i]))
        .collect();
    (Point::new(x), Point::new(y))
}

/// Checks that `map` is a monotone self-map of its domain.
pub fn validate_map(map: &dyn GridMap, mode: ValidationMode) -> Result<ValidationReport> {
    let b = map.domain().clone();
    let mut report = ValidationReport::default();
    let image_ok = |x: &Point, fx: &Point| -> Option<Violation> {
        (!b.contains(fx)).then(|| Violation::NotSelfMap {
            point: x.clone(),
            image: fx.clone(),
        })
    };
    let order_ok = |x: &Point, fx: &Point, y: &Point, fy: &Point| -> Option<Violation> {
        (!fx.precedes(fy)).then(|| Violation::MapMonotone {
            lower: x.clone(),
            upper: y.clone(),
            lower_image: fx.clone(),
            upper_image: fy.clone(),
        })
    };
    match mode {
        ValidationMode::Exhaustive { cap } => {
            let volume = check_cap(&b, cap)?;
            let mut images = Vec::with_capacity(volume as usize);
            for x in b.iter() {
                let fx = map.apply(&x);
                report.points_checked += 1;
                if let Some(v) = image_ok(&x, &fx) {
                    report.violation = Some(v);
                    return Ok(report);
                }
                images.push(fx);
            }
            for x in b.iter() {
                let fx = &images[b.index_of(&x) as usize];
                for i in 0..b.dim() {
                    if x[i] == b.hi()[i] {
                        continue;
                    }
                    let y = x.with(i, x[i] + 1);
                    let fy = &images[b.index_of(&y) as usize];
                    report.pairs_checked += 1;
                    if let Some(v) = order_ok(&x, fx, &y, fy) {
                        report.violation = Some(v);
                        return Ok(report);
                    }
                }
            }
        }
        ValidationMode::Sampled { count, seed } => {
            let mut rng = seeded(seed);
            for _ in 0..count {
                let (x, y) = comparable_pair(&b, &mut rng);
                let fx = map.apply(&x);
                let fy = map.apply(&y);
                report.points_checked += 2;
                report.pairs_checked += 1;
                let v = image_ok(&x, &fx)
                    .or_else(|| image_ok(&y, &fy))
                    .or_else(|| order_ok(&x, &fx, &y, &fy));
                if v.is_some() {
                    report.violation = v;
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{slice_oracle, FnOracle, MapFn, NativeSignOracle, SignFn};

    fn table(n: i64, rows: Vec<Vec<i8>>) -> NativeSignOracle {
        let b = GridBox::cube(n, 1).unwrap();
        NativeSignOracle::from_map(SignFn::new(b, move |x: &Point| {
            SignVector::new(rows[(x[0] - 1) as usize].clone()).unwrap()
        }))
    }

    #[test]
    fn range_violation_is_reported() {
        let mut g = table(2, vec![vec![-1, 0], vec![0, 0]]);
        let r = validate(&mut g, ValidationMode::exhaustive()).unwrap();
        assert_eq!(
            r.violation,
            Some(Violation::Range {
                point: Point::from([1]),
                coord: 1,
                sign: -1
            })
        );
    }

    #[test]
    fn monotone_violation_is_reported() {
        let mut g = table(2, vec![vec![0, 1], vec![0, -1]]);
        let r = validate(&mut g, ValidationMode::exhaustive()).unwrap();
        assert_eq!(
            r.violation,
            Some(Violation::Monotone {
                lower: Point::from([1]),
                upper: Point::from([2]),
                output: 2
            })
        );
        let r = validate(
            &mut g,
            ValidationMode::Sampled {
                count: 200,
                seed: 3,
            },
        )
        .unwrap();
        assert!(!r.is_ok());
    }

    #[test]
    fn slices_of_monotone_maps_validate() {
        let b = GridBox::cube(4, 3).unwrap();
        let mut f = FnOracle::from_map(MapFn::new(b, |x: &Point| {
            Point::new(x.coords().iter().map(|&c| (c + 1).min(4)).collect())
        }));
        for v in 1..=4 {
            let mut g = slice_oracle(&mut f, 1, v).unwrap();
            assert!(validate(&mut g, ValidationMode::exhaustive())
                .unwrap()
                .is_ok());
        }
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let mut g = table(3, vec![vec![0, 0]; 3]);
        assert!(validate(&mut g, ValidationMode::Exhaustive { cap: 2 }).is_err());
    }

    #[test]
    fn map_validation() {
        let b = GridBox::cube(3, 2).unwrap();
        let swap = MapFn::new(b.clone(), |x: &Point| Point::from([4 - x[0], x[1]]));
        let r = validate_map(&swap, ValidationMode::exhaustive()).unwrap();
        assert!(matches!(r.violation, Some(Violation::MapMonotone { .. })));
        assert!(r
            .violation
            .unwrap()
            .to_string()
            .starts_with("monotonicity violated at"));
        let id = MapFn::new(b, |x: &Point| x.clone());
        let r = validate_map(&id, ValidationMode::exhaustive()).unwrap();
        assert!(r.is_ok());
        assert_eq!(r.pairs_checked, 12);
    }
}
