//! Integer grid primitives: points, boxes, sign vectors and the componentwise
//! partial order.
//!
//! Coordinate *values* are 1-based to match `[n] = {1, ..., n}`; dimension
//! *indices* are 0-based like any Rust slice.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TarskiError};

/// Largest admissible side length. Keeps `x ± 1` and row-major indices far
/// away from `i64` overflow.
pub const MAX_SIDE: i64 = 1 << 40;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn splat(dim: usize, value: i64) -> Self {
        Point(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    /// The point with coordinate `index` removed.
    pub fn without(&self, index: usize) -> Point {
        let mut c = self.0.clone();
        c.remove(index);
        Point(c)
    }

    /// The point with `value` inserted so that it ends up at `index`.
    pub fn with_inserted(&self, index: usize, value: i64) -> Point {
        let mut c = self.0.clone();
        c.insert(index, value);
        Point(c)
    }

    pub fn with(&self, index: usize, value: i64) -> Point {
        let mut c = self.0.clone();
        c[index] = value;
        Point(c)
    }

    /// Concatenation `(self, suffix)`.
    pub fn concat(&self, suffix: &Point) -> Point {
        let mut c = self.0.clone();
        c.extend_from_slice(&suffix.0);
        Point(c)
    }

    pub fn split_at(&self, mid: usize) -> (Point, Point) {
        let (a, b) = self.0.split_at(mid);
        (Point(a.to_vec()), Point(b.to_vec()))
    }

    /// Componentwise `a ⪯ b` without the dimension check.
    pub fn precedes(&self, other: &Point) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(v: [i64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_dims(a: &Point, b: &Point) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(TarskiError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `a ⪯ b` in the componentwise order. Incomparable pairs give `false` both ways.
pub fn leq(a: &Point, b: &Point) -> Result<bool> {
    check_dims(a, b)?;
    Ok(a.precedes(b))
}

fn fold_points<'a, I>(points: I, pick: fn(i64, i64) -> i64) -> Result<Point>
where
    I: IntoIterator<Item = &'a Point>,
{
    let mut it = points.into_iter();
    let first = it
        .next()
        .ok_or_else(|| TarskiError::usage("bound of an empty point set"))?;
    let mut acc = first.clone();
    for p in it {
        check_dims(&acc, p)?;
        for (a, &b) in acc.0.iter_mut().zip(&p.0) {
            *a = pick(*a, b);
        }
    }
    Ok(acc)
}

/// Least upper bound: componentwise maximum of a nonempty set.
pub fn lub<'a, I>(points: I) -> Result<Point>
where
    I: IntoIterator<Item = &'a Point>,
{
    fold_points(points, i64::max)
}

/// Greatest lower bound: componentwise minimum of a nonempty set.
pub fn glb<'a, I>(points: I) -> Result<Point>
where
    I: IntoIterator<Item = &'a Point>,
{
    fold_points(points, i64::min)
}

/// A product of nonempty integer intervals `[lo_i, hi_i]`, written `L_{lo,hi}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GridBox {
    lo: Point,
    hi: Point,
}

impl GridBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        check_dims(&lo, &hi)?;
        if lo.dim() == 0 {
            return Err(TarskiError::usage("boxes need at least one dimension"));
        }
        for i in 0..lo.dim() {
            if lo[i] > hi[i] {
                return Err(TarskiError::usage(format!(
                    "empty interval in dimension {i}: {}..={}",
                    lo[i], hi[i]
                )));
            }
            if hi[i] - lo[i] >= MAX_SIDE {
                return Err(TarskiError::usage(format!(
                    "side of dimension {i} exceeds 2^40"
                )));
            }
        }
        Ok(GridBox { lo, hi })
    }

    /// `[n]^k`.
    pub fn cube(n: i64, k: usize) -> Result<Self> {
        GridBox::new(Point::splat(k, 1), Point::splat(k, n))
    }

    /// `[s_1] × ... × [s_k]`.
    pub fn from_sides(sides: &[i64]) -> Result<Self> {
        GridBox::new(Point::splat(sides.len(), 1), Point::new(sides.to_vec()))
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn side(&self, i: usize) -> i64 {
        self.hi[i] - self.lo[i] + 1
    }

    pub fn sides(&self) -> Vec<i64> {
        (0..self.dim()).map(|i| self.side(i)).collect()
    }

    /// Number of points, or `None` when it does not fit in a `u64`.
    pub fn volume(&self) -> Option<u64> {
        (0..self.dim()).try_fold(1u64, |acc, i| acc.checked_mul(self.side(i) as u64))
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dim() == self.dim() && self.lo.precedes(x) && x.precedes(&self.hi)
    }

    pub fn check_contains(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(TarskiError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        if !self.contains(x) {
            return Err(TarskiError::OutOfBox {
                point: x.clone(),
                lo: self.lo.clone(),
                hi: self.hi.clone(),
            });
        }
        Ok(())
    }

    pub fn is_subbox_of(&self, other: &GridBox) -> bool {
        other.contains(&self.lo) && other.contains(&self.hi)
    }

    /// The box with dimension `index` dropped.
    pub fn without(&self, index: usize) -> Result<GridBox> {
        GridBox::new(self.lo.without(index), self.hi.without(index))
    }

    /// Splits into the boxes of the first `mid` and the remaining dimensions.
    pub fn split_at(&self, mid: usize) -> Result<(GridBox, GridBox)> {
        let (la, lb) = self.lo.split_at(mid);
        let (ha, hb) = self.hi.split_at(mid);
        Ok((GridBox::new(la, ha)?, GridBox::new(lb, hb)?))
    }

    /// Row-major position of `x` (last coordinate fastest).
    pub fn index_of(&self, x: &Point) -> u64 {
        let mut idx = 0u64;
        for i in 0..self.dim() {
            idx = idx * self.side(i) as u64 + (x[i] - self.lo[i]) as u64;
        }
        idx
    }

    /// Inverse of [`GridBox::index_of`].
    pub fn point_at(&self, mut index: u64) -> Point {
        let mut c = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            let s = self.side(i) as u64;
            c[i] = self.lo[i] + (index % s) as i64;
            index /= s;
        }
        Point(c)
    }

    pub fn iter(&self) -> BoxIter {
        enumerate_box(self)
    }
}

impl fmt::Display for GridBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..={}", self.lo, self.hi)
    }
}

/// Every point of `b` exactly once, row-major with the last coordinate fastest.
pub fn enumerate_box(b: &GridBox) -> BoxIter {
    BoxIter {
        lo: b.lo.clone(),
        hi: b.hi.clone(),
        next: Some(b.lo.clone()),
    }
}

pub struct BoxIter {
    lo: Point,
    hi: Point,
    next: Option<Point>,
}

impl Iterator for BoxIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.dim();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ.0[i] < self.hi[i] {
                succ.0[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ.0[i] = self.lo[i];
        }
        Some(current)
    }
}

/// An element of `{-1, 0, 1}^m`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| !(-1..=1).contains(*s)) {
            return Err(TarskiError::usage(format!("{bad} is not a sign")));
        }
        Ok(SignVector(signs))
    }

    /// Signs of the given integer differences.
    pub fn from_diffs<I: IntoIterator<Item = i64>>(diffs: I) -> Self {
        SignVector(diffs.into_iter().map(sgn).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn last(&self) -> i8 {
        *self.0.last().expect("sign vectors are nonempty")
    }

    pub fn uniform_nonneg(&self) -> bool {
        self.0.iter().all(|&s| s >= 0)
    }

    pub fn uniform_nonpos(&self) -> bool {
        self.0.iter().all(|&s| s <= 0)
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform_nonneg() || self.uniform_nonpos()
    }

    pub fn set(&mut self, i: usize, s: i8) {
        debug_assert!((-1..=1).contains(&s));
        self.0[i] = s;
    }
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = TarskiError;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        SignVector::new(v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(v: SignVector) -> Self {
        v.0
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                1 => write!(f, "+1")?,
                0 => write!(f, "0")?,
                _ => write!(f, "-1")?,
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn sgn(d: i64) -> i8 {
    d.signum() as i8
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p<const N: usize>(c: [i64; N]) -> Point {
        Point::from(c)
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&p([1, 2]), &p([2, 2])).unwrap());
        assert!(!leq(&p([1, 3]), &p([2, 2])).unwrap());
        assert!(!leq(&p([2, 2]), &p([1, 3])).unwrap());
        assert!(leq(&p([2, 2]), &p([2, 2])).unwrap());
        assert!(matches!(
            leq(&p([1]), &p([1, 1])),
            Err(TarskiError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lub_glb_examples() {
        assert_eq!(lub(&[p([1, 3]), p([2, 2])]).unwrap(), p([2, 3]));
        assert_eq!(lub(&[p([2, 2])]).unwrap(), p([2, 2]));
        assert_eq!(lub(&[p([1, 1]), p([1, 2]), p([3, 1])]).unwrap(), p([3, 2]));
        assert_eq!(glb(&[p([1, 3]), p([2, 2])]).unwrap(), p([1, 2]));
        assert_eq!(glb(&[p([2, 2])]).unwrap(), p([2, 2]));
        assert_eq!(glb(&[p([3, 3]), p([1, 2])]).unwrap(), p([1, 2]));
        assert!(matches!(lub(&[]), Err(TarskiError::Usage(_))));
        assert!(glb(&[p([1]), p([1, 2])]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let b = GridBox::new(p([1, 1]), p([2, 2])).unwrap();
        let pts: Vec<_> = enumerate_box(&b).collect();
        assert_eq!(pts, vec![p([1, 1]), p([1, 2]), p([2, 1]), p([2, 2])]);

        let b = GridBox::new(p([2]), p([4])).unwrap();
        let pts: Vec<_> = enumerate_box(&b).collect();
        assert_eq!(pts, vec![p([2]), p([3]), p([4])]);

        let b = GridBox::new(p([3, 3, 3]), p([3, 3, 3])).unwrap();
        assert_eq!(enumerate_box(&b).collect::<Vec<_>>(), vec![p([3, 3, 3])]);
    }

    #[test]
    fn index_matches_enumeration_order() {
        let b = GridBox::new(p([2, 0, 5]), p([4, 3, 6])).unwrap();
        for (i, x) in b.iter().enumerate() {
            assert_eq!(b.index_of(&x), i as u64);
            assert_eq!(b.point_at(i as u64), x);
        }
        assert_eq!(b.volume(), Some(3 * 4 * 2));
    }

    #[test]
    fn box_rejects_empty_intervals() {
        assert!(GridBox::new(p([2, 1]), p([1, 3])).is_err());
        assert!(GridBox::from_sides(&[]).is_err());
        assert!(GridBox::cube(1 << 41, 2).is_err());
    }

    #[test]
    fn sign_vector_predicates() {
        let v = SignVector::new(vec![0, 1, 0]).unwrap();
        assert!(v.uniform_nonneg() && !v.uniform_nonpos());
        let z = SignVector::new(vec![0, 0]).unwrap();
        assert!(z.uniform_nonneg() && z.uniform_nonpos());
        let m = SignVector::new(vec![1, -1]).unwrap();
        assert!(!m.is_uniform());
        assert!(SignVector::new(vec![2]).is_err());
        assert_eq!(SignVector::from_diffs([5, 0, -3]).as_slice(), &[1, 0, -1]);
    }
}
