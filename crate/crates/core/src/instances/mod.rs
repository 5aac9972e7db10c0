//! Instance families, explicit tables, and the JSON document format.
//!
//! Every family has a plain constructor returning a root oracle and an
//! [`InstanceSpec`] variant that serializes to a small JSON document:
//!
//! ```json
//! {"kind":"hidden_point","sides":[3,3,3],"p":[2,2,2]}
//! ```
//!
//! Explicit tables list one entry per box point in row-major order (last
//! coordinate fastest), all coordinates 1-based.

mod enumerate;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use enumerate::{
    enumerate_monotone_maps, enumerate_sign_tables, monotone_functions, MonotoneMaps,
    SlicedSignCorpus, DEFAULT_COUNT_CAP,
};

use crate::error::{Result, TarskiError};
use crate::lattice::{sgn, GridBox, Point, SignVector};
use crate::oracle::{
    validate, validate_map, FnOracle, GridMap, NativeSignOracle, SignMap, SignOracle,
    ValidationMode, DEFAULT_EXHAUSTIVE_CAP,
};
use crate::rng::seeded;

/// `f(x)_i = x_i + sgn(p_i - x_i)`; unique fixed point `p`.
#[derive(Clone, Debug)]
pub struct HiddenPoint {
    domain: GridBox,
    p: Point,
}

impl HiddenPoint {
    pub fn new(domain: GridBox, p: Point) -> Result<Self> {
        domain.check_contains(&p)?;
        Ok(HiddenPoint { domain, p })
    }

    pub fn target(&self) -> &Point {
        &self.p
    }
}

impl GridMap for HiddenPoint {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn apply(&self, x: &Point) -> Point {
        Point::new(
            (0..x.dim())
                .map(|i| x[i] + sgn(self.p[i] - x[i]) as i64)
                .collect(),
        )
    }
}

/// `f(x)_i = clamp(x_i + v_i, lo_i, hi_i)`.
#[derive(Clone, Debug)]
pub struct ConstantShift {
    domain: GridBox,
    v: Vec<i8>,
}

impl ConstantShift {
    pub fn new(domain: GridBox, v: Vec<i8>) -> Result<Self> {
        if v.len() != domain.dim() {
            return Err(TarskiError::DimensionMismatch {
                expected: domain.dim(),
                found: v.len(),
            });
        }
        if v.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(TarskiError::usage("shift entries must be -1, 0 or 1"));
        }
        Ok(ConstantShift { domain, v })
    }
}

impl GridMap for ConstantShift {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn apply(&self, x: &Point) -> Point {
        let (lo, hi) = (self.domain.lo(), self.domain.hi());
        Point::new(
            (0..x.dim())
                .map(|i| (x[i] + self.v[i] as i64).clamp(lo[i], hi[i]))
                .collect(),
        )
    }
}

/// `f(x)_i = max({lo_i} ∪ {w : (s, w) ∈ S_i, s ⪯ x})` for random step sets.
#[derive(Clone, Debug)]
pub struct RandomSteps {
    domain: GridBox,
    steps: Vec<Vec<(Point, i64)>>,
}

impl RandomSteps {
    /// Draw order: for each output coordinate, for each step, the
    /// coordinates of `s` and then `w`.
    pub fn generate(domain: GridBox, seed: u64, num_steps: usize) -> Result<Self> {
        if num_steps == 0 {
            return Err(TarskiError::usage("num_steps must be at least 1"));
        }
        let mut rng = seeded(seed);
        let (lo, hi) = (domain.lo().clone(), domain.hi().clone());
        let k = domain.dim();
        let steps = (0..k)
            .map(|i| {
                (0..num_steps)
                    .map(|_| {
                        let s = Point::new((0..k).map(|j| rng.gen_range(lo[j]..=hi[j])).collect());
                        let w = rng.gen_range(lo[i]..=hi[i]);
                        (s, w)
                    })
                    .collect()
            })
            .collect();
        Ok(RandomSteps { domain, steps })
    }

    pub fn from_steps(domain: GridBox, steps: Vec<Vec<(Point, i64)>>) -> Result<Self> {
        if steps.len() != domain.dim() {
            return Err(TarskiError::DimensionMismatch {
                expected: domain.dim(),
                found: steps.len(),
            });
        }
        for (i, set) in steps.iter().enumerate() {
            for (s, w) in set {
                domain.check_contains(s)?;
                if *w < domain.lo()[i] || *w > domain.hi()[i] {
                    return Err(TarskiError::usage(format!(
                        "step value {w} outside coordinate {}",
                        i + 1
                    )));
                }
            }
        }
        Ok(RandomSteps { domain, steps })
    }

    pub fn steps(&self) -> &[Vec<(Point, i64)>] {
        &self.steps
    }
}

impl GridMap for RandomSteps {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn apply(&self, x: &Point) -> Point {
        Point::new(
            self.steps
                .iter()
                .enumerate()
                .map(|(i, set)| {
                    set.iter()
                        .filter(|(s, _)| s.precedes(x))
                        .map(|&(_, w)| w)
                        .fold(self.domain.lo()[i], i64::max)
                })
                .collect(),
        )
    }
}

/// `f(x)_i = x_i + sgn(t_i(x) - x_i)` with targets chained through the
/// coordinates: `t_i(x) = p_i + (x_{i+1} - p_{i+1})` for `i < k`, closing
/// with `t_k(x) = p_k + trunc((x_1 - p_1) / 2)`, each clamped to the box.
///
/// `p` is a fixed point, and away from the box boundary the only one. The
/// fixed point of any slice moves with the slice value, so coordinate-wise
/// bisection cannot pin coordinates early as it does on [`HiddenPoint`].
#[derive(Clone, Debug)]
pub struct CoupledPoint {
    domain: GridBox,
    p: Point,
}

impl CoupledPoint {
    pub fn new(domain: GridBox, p: Point) -> Result<Self> {
        domain.check_contains(&p)?;
        Ok(CoupledPoint { domain, p })
    }
}

impl GridMap for CoupledPoint {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn apply(&self, x: &Point) -> Point {
        let k = x.dim();
        let p = &self.p;
        Point::new(
            (0..k)
                .map(|i| {
                    let t = if i + 1 < k {
                        p[i] + (x[i + 1] - p[i + 1])
                    } else {
                        p[i] + (x[0] - p[0]) / 2
                    };
                    let t = t.clamp(self.domain.lo()[i], self.domain.hi()[i]);
                    x[i] + sgn(t - x[i]) as i64
                })
                .collect(),
        )
    }
}

/// Map stored as a row-major table.
#[derive(Clone, Debug)]
pub struct TableMap {
    domain: GridBox,
    values: Vec<Point>,
}

impl TableMap {
    pub fn new(domain: GridBox, values: Vec<Point>) -> Result<Self> {
        check_table_len(&domain, values.len())?;
        if let Some(v) = values.iter().find(|v| v.dim() != domain.dim()) {
            return Err(TarskiError::DimensionMismatch {
                expected: domain.dim(),
                found: v.dim(),
            });
        }
        Ok(TableMap { domain, values })
    }

    /// Tabulates any map over its domain.
    pub fn tabulate(map: &dyn GridMap) -> Self {
        let domain = map.domain().clone();
        let values = domain.iter().map(|x| map.apply(&x)).collect();
        TableMap { domain, values }
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }
}

impl GridMap for TableMap {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn apply(&self, x: &Point) -> Point {
        self.values[self.domain.index_of(x) as usize].clone()
    }
}

/// Sign function stored as a row-major table.
#[derive(Clone, Debug)]
pub struct SignTable {
    domain: GridBox,
    values: Vec<SignVector>,
}

impl SignTable {
    pub fn new(domain: GridBox, values: Vec<SignVector>) -> Result<Self> {
        check_table_len(&domain, values.len())?;
        if let Some(v) = values.iter().find(|v| v.len() != domain.dim() + 1) {
            return Err(TarskiError::DimensionMismatch {
                expected: domain.dim() + 1,
                found: v.len(),
            });
        }
        Ok(SignTable { domain, values })
    }

    pub fn tabulate(map: &dyn SignMap) -> Self {
        let domain = map.domain().clone();
        let values = domain.iter().map(|x| map.signs(&x)).collect();
        SignTable { domain, values }
    }

    pub fn values(&self) -> &[SignVector] {
        &self.values
    }
}

impl SignMap for SignTable {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn signs(&self, x: &Point) -> SignVector {
        self.values[self.domain.index_of(x) as usize].clone()
    }
}

/// Direct lookup with no cache or counters, for sweeping large corpora.
impl SignOracle for SignTable {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn label(&self) -> &'static str {
        "table"
    }
    fn query_labeled(&mut self, x: &Point, _label: &'static str) -> Result<SignVector> {
        self.domain.check_contains(x)?;
        Ok(self.signs(x))
    }
}

/// Native sign oracle with the unique solution `p`:
/// `g_i(x) = sgn(p_i - x_i)` for `i ≤ k` and `g_{k+1}(x) = sgn(Σ_i (x_i - p_i))`.
///
/// Every point other than `p` is mixed, so no solver can stop early by luck.
#[derive(Clone, Debug)]
pub struct HiddenSignPoint {
    domain: GridBox,
    p: Point,
}

impl HiddenSignPoint {
    pub fn new(domain: GridBox, p: Point) -> Result<Self> {
        domain.check_contains(&p)?;
        Ok(HiddenSignPoint { domain, p })
    }

    pub fn target(&self) -> &Point {
        &self.p
    }
}

impl SignMap for HiddenSignPoint {
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn signs(&self, x: &Point) -> SignVector {
        let k = x.dim();
        let mut s: Vec<i8> = (0..k).map(|i| sgn(self.p[i] - x[i])).collect();
        s.push(sgn((0..k).map(|i| x[i] - self.p[i]).sum()));
        SignVector::new(s).expect("signs are in range")
    }
}

fn check_table_len(domain: &GridBox, len: usize) -> Result<()> {
    let volume = domain.volume().unwrap_or(u64::MAX);
    if volume != len as u64 {
        return Err(TarskiError::Load(format!(
            "table has {len} entries but the box {domain} has {volume} points"
        )));
    }
    Ok(())
}

pub fn gen_hidden_point(domain: GridBox, p: Point) -> Result<FnOracle> {
    Ok(FnOracle::from_map(HiddenPoint::new(domain, p)?))
}

pub fn gen_constant_shift(domain: GridBox, v: Vec<i8>) -> Result<FnOracle> {
    Ok(FnOracle::from_map(ConstantShift::new(domain, v)?))
}

pub fn gen_random_steps(domain: GridBox, seed: u64, num_steps: usize) -> Result<FnOracle> {
    Ok(FnOracle::from_map(RandomSteps::generate(
        domain, seed, num_steps,
    )?))
}

/// A serializable instance description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    HiddenPoint {
        sides: Vec<i64>,
        p: Vec<i64>,
    },
    ConstantShift {
        sides: Vec<i64>,
        v: Vec<i8>,
    },
    RandomSteps {
        sides: Vec<i64>,
        seed: u64,
        num_steps: usize,
    },
    ExplicitTable {
        sides: Vec<i64>,
        values: Vec<Vec<i64>>,
    },
    ExplicitSignTable {
        sides: Vec<i64>,
        values: Vec<Vec<i8>>,
    },
    HiddenSignPoint {
        sides: Vec<i64>,
        p: Vec<i64>,
    },
    CoupledPoint {
        sides: Vec<i64>,
        p: Vec<i64>,
    },
}

/// A root oracle built from an [`InstanceSpec`].
pub enum Instance {
    Map(FnOracle),
    Sign(NativeSignOracle),
}

impl InstanceSpec {
    pub fn sides(&self) -> &[i64] {
        match self {
            InstanceSpec::HiddenPoint { sides, .. }
            | InstanceSpec::ConstantShift { sides, .. }
            | InstanceSpec::RandomSteps { sides, .. }
            | InstanceSpec::ExplicitTable { sides, .. }
            | InstanceSpec::ExplicitSignTable { sides, .. }
            | InstanceSpec::HiddenSignPoint { sides, .. }
            | InstanceSpec::CoupledPoint { sides, .. } => sides,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InstanceSpec::HiddenPoint { .. } => "hidden_point",
            InstanceSpec::ConstantShift { .. } => "constant_shift",
            InstanceSpec::RandomSteps { .. } => "random_steps",
            InstanceSpec::ExplicitTable { .. } => "explicit_table",
            InstanceSpec::ExplicitSignTable { .. } => "explicit_sign_table",
            InstanceSpec::HiddenSignPoint { .. } => "hidden_sign_point",
            InstanceSpec::CoupledPoint { .. } => "coupled_point",
        }
    }

    pub fn domain(&self) -> Result<GridBox> {
        GridBox::from_sides(self.sides())
    }

    /// True for kinds describing a map `f` (as opposed to a sign oracle).
    pub fn is_map(&self) -> bool {
        !matches!(
            self,
            InstanceSpec::ExplicitSignTable { .. } | InstanceSpec::HiddenSignPoint { .. }
        )
    }

    /// Builds the map for map kinds.
    pub fn to_map(&self) -> Result<Box<dyn GridMap>> {
        let domain = self.domain()?;
        Ok(match self {
            InstanceSpec::HiddenPoint { p, .. } => {
                Box::new(HiddenPoint::new(domain, Point::new(p.clone()))?)
            }
            InstanceSpec::ConstantShift { v, .. } => {
                Box::new(ConstantShift::new(domain, v.clone())?)
            }
            InstanceSpec::CoupledPoint { p, .. } => {
                Box::new(CoupledPoint::new(domain, Point::new(p.clone()))?)
            }
            InstanceSpec::RandomSteps {
                seed, num_steps, ..
            } => Box::new(RandomSteps::generate(domain, *seed, *num_steps)?),
            InstanceSpec::ExplicitTable { values, .. } => Box::new(TableMap::new(
                domain,
                values.iter().cloned().map(Point::new).collect(),
            )?),
            _ => {
                return Err(TarskiError::usage(format!(
                    "{} describes a sign oracle, not a map",
                    self.kind()
                )))
            }
        })
    }

    /// Builds the sign function for sign kinds.
    pub fn to_sign_map(&self) -> Result<Box<dyn SignMap>> {
        let domain = self.domain()?;
        Ok(match self {
            InstanceSpec::ExplicitSignTable { values, .. } => {
                let rows = values
                    .iter()
                    .map(|v| SignVector::new(v.clone()))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| TarskiError::Load(e.to_string()))?;
                Box::new(SignTable::new(domain, rows)?)
            }
            InstanceSpec::HiddenSignPoint { p, .. } => {
                Box::new(HiddenSignPoint::new(domain, Point::new(p.clone()))?)
            }
            _ => {
                return Err(TarskiError::usage(format!(
                    "{} describes a map, not a sign oracle",
                    self.kind()
                )))
            }
        })
    }

    pub fn instantiate(&self) -> Result<Instance> {
        if self.is_map() {
            Ok(Instance::Map(FnOracle::new(self.to_map()?)))
        } else {
            Ok(Instance::Sign(NativeSignOracle::new(self.to_sign_map()?)))
        }
    }

    /// Draws a random member of a named family.
    pub fn sample(family: Family, sides: &[i64], seed: u64, num_steps: usize) -> Result<Self> {
        let domain = GridBox::from_sides(sides)?;
        let mut rng = seeded(seed);
        let sides = sides.to_vec();
        let random_point = |rng: &mut crate::rng::Rng| -> Vec<i64> {
            (0..domain.dim())
                .map(|i| rng.gen_range(domain.lo()[i]..=domain.hi()[i]))
                .collect()
        };
        Ok(match family {
            Family::HiddenPoint => InstanceSpec::HiddenPoint {
                p: random_point(&mut rng),
                sides,
            },
            Family::HiddenSignPoint => InstanceSpec::HiddenSignPoint {
                p: random_point(&mut rng),
                sides,
            },
            Family::CoupledPoint => InstanceSpec::CoupledPoint {
                p: random_point(&mut rng),
                sides,
            },
            Family::ConstantShift => InstanceSpec::ConstantShift {
                v: (0..domain.dim()).map(|_| rng.gen_range(-1..=1)).collect(),
                sides,
            },
            Family::RandomSteps => InstanceSpec::RandomSteps {
                sides,
                seed,
                num_steps,
            },
        })
    }

    pub fn from_map_table(table: &TableMap) -> Self {
        InstanceSpec::ExplicitTable {
            sides: table.domain.sides(),
            values: table.values.iter().map(|v| v.coords().to_vec()).collect(),
        }
    }
}

/// Randomized families used by sweeps and randomized tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    HiddenPoint,
    ConstantShift,
    RandomSteps,
    HiddenSignPoint,
    CoupledPoint,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::HiddenPoint,
        Family::ConstantShift,
        Family::RandomSteps,
        Family::HiddenSignPoint,
        Family::CoupledPoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::HiddenPoint => "hidden_point",
            Family::ConstantShift => "constant_shift",
            Family::RandomSteps => "random_steps",
            Family::HiddenSignPoint => "hidden_sign_point",
            Family::CoupledPoint => "coupled_point",
        }
    }

    pub fn is_map(self) -> bool {
        self != Family::HiddenSignPoint
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = TarskiError;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| TarskiError::usage(format!("unknown family {s:?}")))
    }
}

/// Parses and validates an instance document. Explicit tables are checked
/// exhaustively; other kinds are correct by construction and only have their
/// parameters checked.
pub fn parse_instance(document: &str) -> Result<InstanceSpec> {
    let spec: InstanceSpec =
        serde_json::from_str(document).map_err(|e| TarskiError::Load(e.to_string()))?;
    let load = |e: TarskiError| match e {
        TarskiError::Load(m) => TarskiError::Load(m),
        other => TarskiError::Load(other.to_string()),
    };
    spec.domain().map_err(load)?;
    let mode = ValidationMode::Exhaustive {
        cap: DEFAULT_EXHAUSTIVE_CAP,
    };
    match &spec {
        InstanceSpec::ExplicitTable { .. } => {
            let map = spec.to_map().map_err(load)?;
            let report = validate_map(map.as_ref(), mode).map_err(load)?;
            if let Some(v) = report.violation {
                return Err(TarskiError::Load(v.to_string()));
            }
        }
        InstanceSpec::ExplicitSignTable { .. } => {
            let mut o = NativeSignOracle::new(spec.to_sign_map().map_err(load)?);
            let report = validate(&mut o, mode).map_err(load)?;
            if let Some(v) = report.violation {
                return Err(TarskiError::Load(v.to_string()));
            }
        }
        InstanceSpec::HiddenSignPoint { .. } => {
            spec.to_sign_map().map_err(load)?;
        }
        _ => {
            spec.to_map().map_err(load)?;
        }
    }
    Ok(spec)
}

pub fn serialize_instance(spec: &InstanceSpec) -> String {
    serde_json::to_string(spec).expect("instance specs always serialize")
}

pub fn load_instance(path: &std::path::Path) -> Result<InstanceSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| TarskiError::Load(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}
