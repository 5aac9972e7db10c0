use std::collections::BTreeMap;

use crate::error::{Result, TarskiError};
use crate::lattice::{GridBox, Point, SignVector};
use crate::oracle::SignOracle;

use super::{bracketed_zero_in_row, solve_star_1d, try_point, SolveContext, StarSolution};

/// Frozen constant for the `solve_star_2d_fps` budget
/// `distinct queries <= C₂ · (log₂(max side) + 1)`.
///
/// Measured over `n = 2^4 ..= 2^16` with 100 seeds per `n`: hidden sign
/// points peak at 1.75, slices of coupled-point and random-steps maps at
/// 1.86. Frozen at 2.5.
pub const FPS_BUDGET_CONSTANT: f64 = 2.5;

type Rect = ([i64; 2], [i64; 2]);

fn area((a, b): &Rect) -> i64 {
    (b[0] - a[0] + 1) * (b[1] - a[1] + 1)
}

/// Sub-rectangles of `[a, b]` that keep the search invariant after querying
/// `q` with signs `g`.
///
/// The invariant: with `F(x) = x + (g_1(x), g_2(x))`, every fixed point of
/// `clamp_[a,b] ∘ F` has uniform signs. It holds on the whole box by the
/// range condition, and a fixed point always exists because the clamped map
/// is monotone.
fn valid_cuts(a: [i64; 2], b: [i64; 2], q: [i64; 2], g: &SignVector) -> Vec<Rect> {
    let (g1, g2, s) = (g.get(0), g.get(1), g.get(2));
    if g1 >= 0 && g2 >= 0 {
        return vec![(q, b)];
    }
    if g1 <= 0 && g2 <= 0 {
        return vec![(a, q)];
    }
    let mut cuts = Vec::with_capacity(2);
    if g1 > 0 {
        // g = (+1, -1, s)
        if s >= 0 || q[0] == b[0] {
            cuts.push((a, [b[0], q[1]]));
        }
        if s <= 0 || q[1] == a[1] {
            cuts.push(([q[0], a[1]], b));
        }
    } else {
        // g = (-1, +1, s)
        if s >= 0 || q[1] == b[1] {
            cuts.push((a, [q[0], b[1]]));
        }
        if s <= 0 || q[0] == a[0] {
            cuts.push(([a[0], q[1]], b));
        }
    }
    cuts
}

fn best_cut(current: &Rect, cuts: Vec<Rect>) -> Option<Rect> {
    cuts.into_iter()
        .filter(|r| area(r) < area(current))
        .min_by_key(area)
}

/// `O(log n)` solver for two-dimensional sign oracles.
///
/// Keeps a rectangle `[a, b]` and queries its midpoint `m`. Uniform signs end
/// the search. Otherwise [`valid_cuts`] lists the sub-rectangles that keep
/// the invariant; one of them always exists, and one strictly shrinks
/// the rectangle unless a side has width 2 and the mixed sign pattern only
/// allows the cut at its lower end. Then a second query at the far edge
/// (`(b_1, m_2)` or `(m_1, b_2)`) always yields a shrinking cut. Rectangles
/// with both sides at most 2 are swept.
pub fn solve_star_2d_fps(o: &mut dyn SignOracle, _ctx: &mut SolveContext) -> Result<StarSolution> {
    let dom = o.domain().clone();
    if dom.dim() != 2 {
        return Err(TarskiError::DimensionMismatch {
            expected: 2,
            found: dom.dim(),
        });
    }
    let mut rect: Rect = ([dom.lo()[0], dom.lo()[1]], [dom.hi()[0], dom.hi()[1]]);
    loop {
        let (a, b) = rect;
        let w = [b[0] - a[0] + 1, b[1] - a[1] + 1];
        if w[0] <= 2 && w[1] <= 2 {
            return sweep(o, a, b);
        }
        let m = [(a[0] + b[0]).div_euclid(2), (a[1] + b[1]).div_euclid(2)];
        let g = o.query(&Point::new(m.to_vec()))?;
        if let Some(sol) = StarSolution::from_signs(Point::new(m.to_vec()), g.clone()) {
            return Ok(sol);
        }
        if let Some(next) = best_cut(&rect, valid_cuts(a, b, m, &g)) {
            rect = next;
            continue;
        }
        let alt = if g.get(0) > 0 {
            [b[0], m[1]]
        } else {
            [m[0], b[1]]
        };
        let ga = o.query(&Point::new(alt.to_vec()))?;
        if let Some(sol) = StarSolution::from_signs(Point::new(alt.to_vec()), ga.clone()) {
            return Ok(sol);
        }
        rect = best_cut(&rect, valid_cuts(a, b, alt, &ga)).ok_or_else(|| {
            TarskiError::invalid(format!(
                "g({},{}) = {g} and g({},{}) = {ga} leave no consistent sub-rectangle of [{a:?}, {b:?}]",
                m[0], m[1], alt[0], alt[1]
            ))
        })?;
    }
}

fn sweep(o: &mut dyn SignOracle, a: [i64; 2], b: [i64; 2]) -> Result<StarSolution> {
    let rect = GridBox::new(Point::new(a.to_vec()), Point::new(b.to_vec()))?;
    for x in rect.iter() {
        if let Some(sol) = try_point(o, &x)? {
            return Ok(sol);
        }
    }
    Err(TarskiError::invalid(format!(
        "no uniform point in {rect}; the oracle breaks the range or monotone condition"
    )))
}

/// Row-wise view of a 2-D oracle: `h(y) = (g_2, g_3)` at the point `(c_y, y)`
/// whose first sign is 0. Columns found on earlier rows bracket later ones:
/// `g_1` is non-decreasing in `y` at a fixed column.
struct RowCurve<'a> {
    o: &'a mut dyn SignOracle,
    domain: GridBox,
    columns: BTreeMap<i64, (i64, SignVector)>,
}

impl SignOracle for RowCurve<'_> {
    fn domain(&self) -> &GridBox {
        &self.domain
    }

    fn label(&self) -> &'static str {
        "row-curve"
    }

    fn query_labeled(&mut self, x: &Point, _label: &'static str) -> Result<SignVector> {
        self.domain.check_contains(x)?;
        let y = x[0];
        if !self.columns.contains_key(&y) {
            let full = self.o.domain();
            let cl = self
                .columns
                .range(..y)
                .map(|(_, (c, _))| *c)
                .max()
                .unwrap_or(full.lo()[0]);
            let cr = self
                .columns
                .range(y + 1..)
                .map(|(_, (c, _))| *c)
                .min()
                .unwrap_or(full.hi()[0]);
            if cl > cr {
                return Err(TarskiError::invalid(format!(
                    "row {y}: column bracket {cl}..={cr} is empty"
                )));
            }
            let found = bracketed_zero_in_row(self.o, y, cl, cr)?;
            self.columns.insert(y, found);
        }
        let g = &self.columns[&y].1;
        SignVector::new(vec![g.get(1), g.get(2)])
    }
}

/// `O(log² n)` solver: 1-D search over rows, where each row is represented by
/// a point whose first sign is 0.
pub fn solve_star_2d_staircase(
    o: &mut dyn SignOracle,
    ctx: &mut SolveContext,
) -> Result<StarSolution> {
    let dom = o.domain().clone();
    if dom.dim() != 2 {
        return Err(TarskiError::DimensionMismatch {
            expected: 2,
            found: dom.dim(),
        });
    }
    let mut curve = RowCurve {
        domain: GridBox::new(Point::new(vec![dom.lo()[1]]), Point::new(vec![dom.hi()[1]]))?,
        o,
        columns: BTreeMap::new(),
    };
    let row = solve_star_1d(&mut curve, ctx)?;
    let y = row.point[0];
    let (c, g) = curve.columns[&y].clone();
    StarSolution::from_signs(Point::new(vec![c, y]), g.clone()).ok_or_else(|| {
        TarskiError::Contract(format!(
            "row search ended at ({c},{y}) with mixed signs {g}"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sgn;
    use crate::oracle::{slice_oracle, FnOracle, MapFn};
    use crate::star::test_support::{sign_oracle, solutions};
    use crate::star::{Polarity, StarSolver};

    const SOLVERS: [(&str, &StarSolver<'static>); 2] = [
        ("fps", &solve_star_2d_fps),
        ("staircase", &solve_star_2d_staircase),
    ];

    #[test]
    fn diagonal_example() {
        for (name, solve) in SOLVERS {
            let mut o = sign_oracle(&[3, 3], |x| {
                vec![sgn(2 - x[0]), sgn(2 - x[1]), sgn(x[0] + x[1] - 4)]
            });
            let sol = solve(&mut o, &mut SolveContext::default()).unwrap();
            assert_eq!(sol.point, Point::from([2, 2]), "{name}");
            assert_eq!(sol.signs.as_slice(), &[0, 0, 0]);
            assert_eq!(
                solutions(&o, &GridBox::cube(3, 2).unwrap()),
                vec![Point::from([2, 2])]
            );
        }
    }

    #[test]
    fn identity_slice() {
        for (name, solve) in SOLVERS {
            let b = GridBox::cube(3, 3).unwrap();
            let mut f = FnOracle::from_map(MapFn::new(b, |x: &Point| x.clone()));
            let mut g = slice_oracle(&mut f, 2, 2).unwrap();
            let sol = solve(&mut g, &mut SolveContext::default()).unwrap();
            assert_eq!(sol.signs.as_slice(), &[0, 0, 0], "{name}");
            assert_eq!(f.stats().distinct_queries, 1, "{name}");
        }
    }

    #[test]
    fn shifted_up_slice_is_nonneg() {
        for (name, solve) in SOLVERS {
            let b = GridBox::cube(3, 3).unwrap();
            let mut f = FnOracle::from_map(MapFn::new(b, |x: &Point| {
                Point::new(x.coords().iter().map(|&c| (c + 1).min(3)).collect())
            }));
            let mut g = slice_oracle(&mut f, 2, 2).unwrap();
            let sol = solve(&mut g, &mut SolveContext::default()).unwrap();
            assert_eq!(sol.polarity, Polarity::Nonneg, "{name}");
            assert_eq!(sol.signs.get(2), 1, "{name}");
        }
    }

    #[test]
    fn single_point_box() {
        for (_, solve) in SOLVERS {
            let mut o = sign_oracle(&[1, 1], |_| vec![0, 0, 1]);
            let sol = solve(&mut o, &mut SolveContext::default()).unwrap();
            assert_eq!(sol.point, Point::from([1, 1]));
        }
    }

    #[test]
    fn unique_solution_anywhere() {
        let sides = [7i64, 5];
        for p in GridBox::from_sides(&sides).unwrap().iter() {
            for (name, solve) in SOLVERS {
                let q = p.clone();
                let mut o = sign_oracle(&sides, move |x| {
                    vec![
                        sgn(q[0] - x[0]),
                        sgn(q[1] - x[1]),
                        sgn(x[0] + x[1] - q[0] - q[1]),
                    ]
                });
                let sol = solve(&mut o, &mut SolveContext::default()).unwrap();
                assert_eq!(sol.point, p, "{name}");
            }
        }
    }

    #[test]
    fn fps_budget_on_wide_boxes() {
        for n in [16i64, 1 << 10, 1 << 16] {
            for p in [[1, n], [n, 1], [n / 2, n / 3 + 1], [n, n], [2, n - 1]] {
                let mut o = sign_oracle(&[n, n], move |x| {
                    vec![
                        sgn(p[0] - x[0]),
                        sgn(p[1] - x[1]),
                        sgn(x[0] + x[1] - p[0] - p[1]),
                    ]
                });
                let sol = solve_star_2d_fps(&mut o, &mut SolveContext::default()).unwrap();
                assert_eq!(sol.point, Point::from(p));
                let budget = FPS_BUDGET_CONSTANT * ((n as f64).log2() + 1.0);
                assert!(
                    (o.stats().distinct_queries as f64) <= budget,
                    "n={n} p={p:?}"
                );
            }
        }
    }
}
