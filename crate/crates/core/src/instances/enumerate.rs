use std::collections::BTreeSet;

use crate::error::{Result, TarskiError};
use crate::lattice::{sgn, GridBox, Point, SignVector};

use super::{SignTable, TableMap};

/// Default limit on the number of maps (and per-coordinate functions) an
/// enumeration may produce.
pub const DEFAULT_COUNT_CAP: u64 = 1_000_000;

/// Every monotone function `domain -> [lo, hi]`, each as a row-major value
/// table, in lexicographic order of the tables.
pub fn monotone_functions(domain: &GridBox, lo: i64, hi: i64, cap: u64) -> Result<Vec<Vec<i64>>> {
    if lo > hi {
        return Err(TarskiError::usage(format!(
            "empty target range {lo}..={hi}"
        )));
    }
    let volume = domain
        .volume()
        .filter(|&v| v <= cap)
        .ok_or_else(|| TarskiError::usage(format!("{domain} is too large to enumerate")))?
        as usize;
    let k = domain.dim();
    let mut strides = vec![1usize; k];
    for j in (0..k.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * domain.side(j + 1) as usize;
    }
    // predecessors[idx] lists the row-major indices of x - e_j inside the box.
    let predecessors: Vec<Vec<usize>> = domain
        .iter()
        .enumerate()
        .map(|(idx, x)| {
            (0..k)
                .filter(|&j| x[j] > domain.lo()[j])
                .map(|j| idx - strides[j])
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut values = vec![lo; volume];
    fill(0, &predecessors, lo, hi, cap, &mut values, &mut out)?;
    Ok(out)
}

fn fill(
    pos: usize,
    predecessors: &[Vec<usize>],
    lo: i64,
    hi: i64,
    cap: u64,
    values: &mut [i64],
    out: &mut Vec<Vec<i64>>,
) -> Result<()> {
    if pos == values.len() {
        if out.len() as u64 >= cap {
            return Err(TarskiError::usage(format!(
                "more than {cap} monotone functions to enumerate"
            )));
        }
        out.push(values.to_vec());
        return Ok(());
    }
    let floor = predecessors[pos]
        .iter()
        .map(|&p| values[p])
        .fold(lo, i64::max);
    for v in floor..=hi {
        values[pos] = v;
        fill(pos + 1, predecessors, lo, hi, cap, values, out)?;
    }
    Ok(())
}

/// Every monotone self-map of a box, as the product over output coordinates
/// of the monotone functions into each coordinate range.
pub struct MonotoneMaps {
    domain: GridBox,
    per_coord: Vec<Vec<Vec<i64>>>,
    odometer: Vec<usize>,
    remaining: u64,
}

pub fn enumerate_monotone_maps(domain: &GridBox, cap: u64) -> Result<MonotoneMaps> {
    let per_coord = (0..domain.dim())
        .map(|i| monotone_functions(domain, domain.lo()[i], domain.hi()[i], cap))
        .collect::<Result<Vec<_>>>()?;
    let total = per_coord
        .iter()
        .try_fold(1u64, |acc, fs| acc.checked_mul(fs.len() as u64))
        .filter(|&t| t <= cap)
        .ok_or_else(|| TarskiError::usage(format!("more than {cap} monotone maps on {domain}")))?;
    Ok(MonotoneMaps {
        domain: domain.clone(),
        odometer: vec![0; per_coord.len()],
        per_coord,
        remaining: total,
    })
}

impl MonotoneMaps {
    /// Number of monotone functions into each output coordinate.
    pub fn per_coordinate_counts(&self) -> Vec<usize> {
        self.per_coord.iter().map(Vec::len).collect()
    }
}

impl Iterator for MonotoneMaps {
    type Item = TableMap;

    fn next(&mut self) -> Option<TableMap> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let volume = self.per_coord[0][0].len();
        let values = (0..volume)
            .map(|idx| {
                Point::new(
                    self.per_coord
                        .iter()
                        .zip(&self.odometer)
                        .map(|(fs, &c)| fs[c][idx])
                        .collect(),
                )
            })
            .collect();
        for i in (0..self.odometer.len()).rev() {
            self.odometer[i] += 1;
            if self.odometer[i] < self.per_coord[i].len() {
                break;
            }
            self.odometer[i] = 0;
        }
        Some(TableMap::new(self.domain.clone(), values).expect("tables match the box"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

impl ExactSizeIterator for MonotoneMaps {}

/// Every sign table on `domain` meeting the range and monotone conditions,
/// found by backtracking in row-major order. Intended for tiny boxes.
pub fn enumerate_sign_tables(domain: &GridBox, cap: u64) -> Result<Vec<SignTable>> {
    let volume = domain
        .volume()
        .filter(|&v| v <= 64)
        .ok_or_else(|| TarskiError::usage(format!("{domain} is too large to enumerate")))?
        as usize;
    let k = domain.dim();
    let points: Vec<Point> = domain.iter().collect();
    let candidates: Vec<SignVector> = (0..3usize.pow(k as u32 + 1))
        .map(|mut code| {
            SignVector::new(
                (0..=k)
                    .map(|_| {
                        let s = (code % 3) as i8 - 1;
                        code /= 3;
                        s
                    })
                    .collect(),
            )
            .expect("signs are in range")
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<SignVector> = Vec::with_capacity(volume);
    sign_fill(domain, &points, &candidates, cap, &mut chosen, &mut out)?;
    Ok(out)
}

fn sign_fill(
    domain: &GridBox,
    points: &[Point],
    candidates: &[SignVector],
    cap: u64,
    chosen: &mut Vec<SignVector>,
    out: &mut Vec<SignTable>,
) -> Result<()> {
    let pos = chosen.len();
    if pos == points.len() {
        if out.len() as u64 >= cap {
            return Err(TarskiError::usage(format!(
                "more than {cap} sign tables to enumerate"
            )));
        }
        out.push(SignTable::new(domain.clone(), chosen.clone())?);
        return Ok(());
    }
    let x = &points[pos];
    let k = domain.dim();
    for g in candidates {
        let in_range = (0..k).all(|i| {
            let m = x[i] + g.get(i) as i64;
            m >= domain.lo()[i] && m <= domain.hi()[i]
        });
        if !in_range {
            continue;
        }
        let monotone = (0..k).filter(|&j| x[j] > domain.lo()[j]).all(|j| {
            let prev = &chosen[domain.index_of(&x.with(j, x[j] - 1)) as usize];
            (0..=k).all(|t| {
                let step = if t == j { 1 } else { 0 };
                prev.get(t) as i64 <= step + g.get(t) as i64
            })
        });
        if monotone {
            chosen.push(g.clone());
            sign_fill(domain, points, candidates, cap, chosen, out)?;
            chosen.pop();
        }
    }
    Ok(())
}

/// The sliced sign oracles of every monotone self-map of `domain`, one
/// group per slice `(dim, value)`.
///
/// Output `j` of a sliced oracle only depends on `f_j` restricted to the
/// slice, which can be any monotone function of the slice (extend it
/// constantly along the sliced dimension). So the set of sliced oracles is
/// the product over `j` of the distinct per-output sign patterns
/// `sgn(h(x) - x'_j)`, which is much smaller than the set of maps.
pub struct SlicedSignCorpus {
    groups: Vec<SliceGroup>,
}

struct SliceGroup {
    dim: usize,
    value: i64,
    slice: GridBox,
    /// Per output (sliced dimension last): distinct sign patterns.
    patterns: Vec<Vec<Vec<i8>>>,
}

impl SliceGroup {
    fn len(&self) -> u64 {
        self.patterns.iter().map(|p| p.len() as u64).product()
    }
}

impl SlicedSignCorpus {
    pub fn new(domain: &GridBox, cap: u64) -> Result<Self> {
        let k = domain.dim();
        if k < 2 {
            return Err(TarskiError::usage("slicing needs at least 2 dimensions"));
        }
        let mut groups = Vec::new();
        for dim in 0..k {
            let slice = domain.without(dim)?;
            for value in domain.lo()[dim]..=domain.hi()[dim] {
                let mut order: Vec<usize> = (0..k).filter(|&j| j != dim).collect();
                order.push(dim);
                let patterns = order
                    .iter()
                    .map(|&j| {
                        let hs = monotone_functions(&slice, domain.lo()[j], domain.hi()[j], cap)?;
                        let set: BTreeSet<Vec<i8>> = hs
                            .iter()
                            .map(|h| {
                                slice
                                    .iter()
                                    .zip(h)
                                    .map(|(x, &hx)| sgn(hx - x.with_inserted(dim, value)[j]))
                                    .collect()
                            })
                            .collect();
                        Ok(set.into_iter().collect())
                    })
                    .collect::<Result<Vec<_>>>()?;
                groups.push(SliceGroup {
                    dim,
                    value,
                    slice: slice.clone(),
                    patterns,
                });
            }
        }
        let corpus = SlicedSignCorpus { groups };
        if corpus.len() > cap {
            return Err(TarskiError::usage(format!(
                "{} sliced oracles exceed the cap of {cap}",
                corpus.len()
            )));
        }
        Ok(corpus)
    }

    pub fn len(&self) -> u64 {
        self.groups.iter().map(SliceGroup::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th oracle with its slice `(dim, value)`.
    pub fn get(&self, mut index: u64) -> Option<(usize, i64, SignTable)> {
        for g in &self.groups {
            let n = g.len();
            if index >= n {
                index -= n;
                continue;
            }
            let mut picks = Vec::with_capacity(g.patterns.len());
            for p in g.patterns.iter().rev() {
                picks.push(&p[(index % p.len() as u64) as usize]);
                index /= p.len() as u64;
            }
            picks.reverse();
            let volume = picks[0].len();
            let rows = (0..volume)
                .map(|i| SignVector::new(picks.iter().map(|p| p[i]).collect()))
                .collect::<Result<Vec<_>>>()
                .ok()?;
            return Some((g.dim, g.value, SignTable::new(g.slice.clone(), rows).ok()?));
        }
        None
    }

    /// Group sizes as `(dim, value, count)`.
    pub fn groups(&self) -> Vec<(usize, i64, u64)> {
        self.groups
            .iter()
            .map(|g| (g.dim, g.value, g.len()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{validate_map, GridMap, ValidationMode};

    /// Counts monotone maps by filtering all `n^(k·volume)` tables.
    fn brute_count(sides: &[i64]) -> usize {
        let b = GridBox::from_sides(sides).unwrap();
        let pts: Vec<Point> = b.iter().collect();
        let k = b.dim();
        let slots = pts.len() * k;
        let radix: Vec<i64> = (0..slots).map(|s| b.side(s % k)).collect();
        let total: i64 = radix.iter().product();
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let vals: Vec<i64> = radix
                    .iter()
                    .map(|&r| {
                        let v = c % r + 1;
                        c /= r;
                        v
                    })
                    .collect();
                let img = |i: usize| &vals[i * k..(i + 1) * k];
                pts.iter().enumerate().all(|(i, x)| {
                    pts.iter().enumerate().all(|(j, y)| {
                        !x.precedes(y) || img(i).iter().zip(img(j)).all(|(a, b)| a <= b)
                    })
                })
            })
            .count()
    }

    #[test]
    fn counts_match_brute_force() {
        for sides in [&[2][..], &[3], &[2, 2], &[4], &[2, 3]] {
            let b = GridBox::from_sides(sides).unwrap();
            let maps = enumerate_monotone_maps(&b, DEFAULT_COUNT_CAP).unwrap();
            assert_eq!(maps.len(), brute_count(sides), "sides {sides:?}");
        }
    }

    #[test]
    fn known_counts() {
        let count = |s: &[i64]| {
            enumerate_monotone_maps(&GridBox::from_sides(s).unwrap(), DEFAULT_COUNT_CAP)
                .unwrap()
                .len()
        };
        assert_eq!(count(&[2]), 3);
        assert_eq!(count(&[3]), 10);
        assert_eq!(count(&[2, 2]), 36);
        let b = GridBox::cube(3, 2).unwrap();
        assert_eq!(
            monotone_functions(&b, 1, 3, DEFAULT_COUNT_CAP)
                .unwrap()
                .len(),
            175
        );
        assert_eq!(count(&[3, 3]), 175 * 175);
    }

    #[test]
    fn maps_are_distinct_and_monotone() {
        let b = GridBox::from_sides(&[2, 3]).unwrap();
        let maps: Vec<TableMap> = enumerate_monotone_maps(&b, DEFAULT_COUNT_CAP)
            .unwrap()
            .collect();
        let mut seen = std::collections::HashSet::new();
        for m in &maps {
            assert!(validate_map(m, ValidationMode::exhaustive())
                .unwrap()
                .is_ok());
            assert!(seen.insert(m.values().to_vec()));
            assert_eq!(m.domain(), &b);
        }
    }

    #[test]
    fn sign_tables_match_filtered_brute_force() {
        use crate::oracle::{validate, NativeSignOracle};
        for n in 1..=4i64 {
            let b = GridBox::cube(n, 1).unwrap();
            let tables = enumerate_sign_tables(&b, DEFAULT_COUNT_CAP).unwrap();
            let mut brute = 0;
            for code in 0..9u32.pow(n as u32) {
                let mut c = code;
                let rows: Vec<SignVector> = (0..n)
                    .map(|_| {
                        let v = vec![(c % 3) as i8 - 1, ((c / 3) % 3) as i8 - 1];
                        c /= 9;
                        SignVector::new(v).unwrap()
                    })
                    .collect();
                let mut o = NativeSignOracle::from_map(SignTable::new(b.clone(), rows).unwrap());
                if validate(&mut o, ValidationMode::exhaustive())
                    .unwrap()
                    .is_ok()
                {
                    brute += 1;
                }
            }
            assert_eq!(tables.len(), brute, "n={n}");
        }
    }

    #[test]
    fn sliced_corpus_covers_slices_of_enumerated_maps() {
        use crate::oracle::{slice_oracle, FnOracle, SignOracle};
        let b = GridBox::cube(2, 3).unwrap();
        let corpus = SlicedSignCorpus::new(&b, DEFAULT_COUNT_CAP).unwrap();
        let mut tables = std::collections::HashSet::new();
        for i in 0..corpus.len() {
            let (d, v, t) = corpus.get(i).unwrap();
            tables.insert((d, v, t.values().to_vec()));
        }
        assert_eq!(tables.len() as u64, corpus.len());
        for m in enumerate_monotone_maps(&b, DEFAULT_COUNT_CAP)
            .unwrap()
            .step_by(97)
        {
            let mut f = FnOracle::from_map(m);
            for d in 0..3 {
                for v in 1..=2 {
                    let mut g = slice_oracle(&mut f, d, v).unwrap();
                    let rows: Vec<SignVector> = GridBox::cube(2, 2)
                        .unwrap()
                        .iter()
                        .map(|x| g.query(&x).unwrap())
                        .collect();
                    assert!(tables.contains(&(d, v, rows)));
                }
            }
        }
    }

    #[test]
    fn caps_are_enforced() {
        let b = GridBox::cube(3, 2).unwrap();
        assert!(enumerate_monotone_maps(&b, 1000).is_err());
        assert!(monotone_functions(&b, 1, 3, 100).is_err());
    }
}
