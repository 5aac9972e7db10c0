//! Query interfaces for monotone maps and sign oracles, with query
//! accounting at the root.
//!
//! A *root* oracle ([`FnOracle`] or [`NativeSignOracle`]) owns the function,
//! a cache and the [`QueryStats`]. Adapters borrow a root (or another
//! adapter) mutably and transform queries on the way through, so every
//! evaluation is charged to the root no matter how deep the adapter stack.

mod adapters;
mod validate;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

pub use adapters::{
    box_restriction, collapse_last_down, collapse_last_up, project_last, slice_oracle,
    CollapseLast, ProjectLast, Restricted, SliceOracle,
};
pub use validate::{
    validate, validate_map, ValidationMode, ValidationReport, Violation, DEFAULT_EXHAUSTIVE_CAP,
};

use crate::error::{Result, TarskiError};
use crate::lattice::{GridBox, Point, SignVector};

/// Label for queries issued by debug-only invariant checks. These are
/// excluded from [`QueryStats::budget_queries`].
pub const DEBUG_LABEL: &str = "debug";

/// A function `box -> box`, intended to be monotone.
pub trait GridMap: Send + Sync {
    fn domain(&self) -> &GridBox;
    fn apply(&self, x: &Point) -> Point;
}

/// A function `box -> {-1,0,1}^{k+1}`, intended to satisfy the range and
/// monotone conditions of a sign oracle.
pub trait SignMap: Send + Sync {
    fn domain(&self) -> &GridBox;
    fn signs(&self, x: &Point) -> SignVector;
}

/// Queryable sign function `g: box -> {-1,0,1}^{k+1}`.
///
/// Validity (checked by [`validate`], never assumed enforced):
/// * range: `x_i + g(x)_i ∈ [lo_i, hi_i]` for `i < k`;
/// * monotone: `x ⪯ y ⇒ (x,0) + g(x) ⪯ (y,0) + g(y)`.
pub trait SignOracle {
    fn domain(&self) -> &GridBox;

    fn outputs(&self) -> usize {
        self.domain().dim() + 1
    }

    /// Label charged in the per-adapter breakdown when this oracle is queried
    /// directly.
    fn label(&self) -> &'static str;

    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector>;

    fn query(&mut self, x: &Point) -> Result<SignVector> {
        let label = self.label();
        self.query_labeled(x, label)
    }
}

impl<T: SignOracle + ?Sized> SignOracle for &mut T {
    fn domain(&self) -> &GridBox {
        (**self).domain()
    }
    fn outputs(&self) -> usize {
        (**self).outputs()
    }
    fn label(&self) -> &'static str {
        (**self).label()
    }
    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector> {
        (**self).query_labeled(x, label)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryStats {
    /// Every query that reached the root, repeats included.
    pub total_queries: u64,
    /// Distinct points evaluated at the root (the root cache size).
    pub distinct_queries: u64,
    /// Queries issued by debug checks.
    pub debug_queries: u64,
    /// Distinct points requested by anything other than debug checks.
    pub budget_queries: u64,
    pub by_label: BTreeMap<String, u64>,
}

struct Entry<V> {
    value: Option<V>,
    budgeted: bool,
}

/// Root-level memo table and counters.
struct QueryCache<V> {
    entries: HashMap<Point, Entry<V>>,
    stats: QueryStats,
    cache_values: bool,
}

impl<V: Clone> QueryCache<V> {
    fn new() -> Self {
        QueryCache {
            entries: HashMap::new(),
            stats: QueryStats::default(),
            cache_values: true,
        }
    }

    fn lookup(&mut self, x: &Point, label: &'static str, compute: impl FnOnce() -> V) -> V {
        let stats = &mut self.stats;
        stats.total_queries += 1;
        *stats.by_label.entry(label.to_string()).or_insert(0) += 1;
        let debug = label == DEBUG_LABEL;
        if debug {
            stats.debug_queries += 1;
        }
        match self.entries.get_mut(x) {
            Some(e) => {
                if !debug && !e.budgeted {
                    e.budgeted = true;
                    stats.budget_queries += 1;
                }
                match &e.value {
                    Some(v) => v.clone(),
                    None => compute(),
                }
            }
            None => {
                stats.distinct_queries += 1;
                if !debug {
                    stats.budget_queries += 1;
                }
                let v = compute();
                self.entries.insert(
                    x.clone(),
                    Entry {
                        value: self.cache_values.then(|| v.clone()),
                        budgeted: !debug,
                    },
                );
                v
            }
        }
    }

    fn reset(&mut self) {
        self.entries.clear();
        self.stats = QueryStats::default();
    }
}

/// Root oracle for a map `f: box -> box`.
pub struct FnOracle {
    map: Box<dyn GridMap>,
    cache: QueryCache<Point>,
}

impl FnOracle {
    pub fn new(map: Box<dyn GridMap>) -> Self {
        FnOracle {
            map,
            cache: QueryCache::new(),
        }
    }

    pub fn from_map<M: GridMap + 'static>(map: M) -> Self {
        FnOracle::new(Box::new(map))
    }

    /// With `false`, every query re-evaluates the map; distinct points are
    /// still tracked so the counters mean the same thing.
    pub fn set_value_caching(&mut self, on: bool) {
        self.cache.cache_values = on;
    }

    pub fn domain(&self) -> &GridBox {
        self.map.domain()
    }

    pub fn dim(&self) -> usize {
        self.domain().dim()
    }

    pub fn eval(&mut self, x: &Point) -> Result<Point> {
        self.eval_labeled(x, "root")
    }

    pub fn eval_labeled(&mut self, x: &Point, label: &'static str) -> Result<Point> {
        self.domain().check_contains(x)?;
        let map = &self.map;
        let y = self.cache.lookup(x, label, || map.apply(x));
        if !self.map.domain().contains(&y) {
            return Err(TarskiError::invalid(format!(
                "f{x} = {y} leaves the box {}",
                self.map.domain()
            )));
        }
        Ok(y)
    }

    /// Evaluates without touching the cache or the counters.
    pub fn fresh_eval(&self, x: &Point) -> Point {
        self.map.apply(x)
    }

    pub fn map(&self) -> &dyn GridMap {
        self.map.as_ref()
    }

    pub fn stats(&self) -> &QueryStats {
        &self.cache.stats
    }

    pub fn cache_len(&self) -> usize {
        self.cache.entries.len()
    }

    pub fn reset_stats(&mut self) {
        self.cache.reset();
    }
}

/// Root oracle for a native sign function.
pub struct NativeSignOracle {
    map: Box<dyn SignMap>,
    cache: QueryCache<SignVector>,
}

impl NativeSignOracle {
    pub fn new(map: Box<dyn SignMap>) -> Self {
        NativeSignOracle {
            map,
            cache: QueryCache::new(),
        }
    }

    pub fn from_map<M: SignMap + 'static>(map: M) -> Self {
        NativeSignOracle::new(Box::new(map))
    }

    pub fn set_value_caching(&mut self, on: bool) {
        self.cache.cache_values = on;
    }

    pub fn fresh_eval(&self, x: &Point) -> SignVector {
        self.map.signs(x)
    }

    pub fn stats(&self) -> &QueryStats {
        &self.cache.stats
    }

    pub fn cache_len(&self) -> usize {
        self.cache.entries.len()
    }

    pub fn reset_stats(&mut self) {
        self.cache.reset();
    }
}

impl SignOracle for NativeSignOracle {
    fn domain(&self) -> &GridBox {
        self.map.domain()
    }

    fn label(&self) -> &'static str {
        "root"
    }

    fn query_labeled(&mut self, x: &Point, label: &'static str) -> Result<SignVector> {
        self.map.domain().check_contains(x)?;
        let map = &self.map;
        let v = self.cache.lookup(x, label, || map.signs(x));
        if v.len() != self.map.domain().dim() + 1 {
            return Err(TarskiError::invalid(format!(
                "g{x} has {} signs, expected {}",
                v.len(),
                self.map.domain().dim() + 1
            )));
        }
        Ok(v)
    }
}

/// Sign function given by a closure; handy for tests and examples.
pub struct SignFn<F> {
    domain: GridBox,
    f: F,
}

impl<F> SignFn<F>
where
    F: Fn(&Point) -> SignVector + Send + Sync,
{
    pub fn new(domain: GridBox, f: F) -> Self {
        SignFn { domain, f }
    }
}

impl<F> SignMap for SignFn<F>
where
    F: Fn(&Point) -> SignVector + Send + Sync,
{
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn signs(&self, x: &Point) -> SignVector {
        (self.f)(x)
    }
}

/// Map given by a closure.
pub struct MapFn<F> {
    domain: GridBox,
    f: F,
}

impl<F> MapFn<F>
where
    F: Fn(&Point) -> Point + Send + Sync,
{
    pub fn new(domain: GridBox, f: F) -> Self {
        MapFn { domain, f }
    }
}

impl<F> GridMap for MapFn<F>
where
    F: Fn(&Point) -> Point + Send + Sync,
{
    fn domain(&self) -> &GridBox {
        &self.domain
    }
    fn apply(&self, x: &Point) -> Point {
        (self.f)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: i64, k: usize) -> FnOracle {
        FnOracle::from_map(MapFn::new(GridBox::cube(n, k).unwrap(), |x: &Point| {
            x.clone()
        }))
    }

    #[test]
    fn counters_track_repeats_and_labels() {
        let mut f = identity(3, 2);
        f.eval(&Point::from([1, 1])).unwrap();
        f.eval(&Point::from([1, 1])).unwrap();
        f.eval_labeled(&Point::from([2, 1]), DEBUG_LABEL).unwrap();
        f.eval(&Point::from([2, 1])).unwrap();
        let s = f.stats();
        assert_eq!(s.total_queries, 4);
        assert_eq!(s.distinct_queries, 2);
        assert_eq!(s.debug_queries, 1);
        assert_eq!(s.budget_queries, 2);
        assert_eq!(s.by_label["root"], 3);
        assert_eq!(f.cache_len() as u64, s.distinct_queries);
    }

    #[test]
    fn debug_only_points_stay_out_of_budget() {
        let mut f = identity(3, 1);
        f.eval_labeled(&Point::from([3]), DEBUG_LABEL).unwrap();
        assert_eq!(f.stats().budget_queries, 0);
        assert_eq!(f.stats().distinct_queries, 1);
    }

    #[test]
    fn out_of_box_queries_are_usage_errors() {
        let mut f = identity(3, 2);
        assert!(matches!(
            f.eval(&Point::from([0, 1])),
            Err(TarskiError::OutOfBox { .. })
        ));
        assert!(matches!(
            f.eval(&Point::from([1])),
            Err(TarskiError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_self_maps_are_caught_at_query_time() {
        let b = GridBox::cube(3, 1).unwrap();
        let mut f = FnOracle::from_map(MapFn::new(b, |x: &Point| Point::from([x[0] + 1])));
        assert!(f.eval(&Point::from([2])).is_ok());
        assert!(matches!(
            f.eval(&Point::from([3])),
            Err(TarskiError::InstanceInvalid(_))
        ));
    }
}
