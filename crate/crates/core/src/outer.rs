//! Fixed-point search for monotone maps `f: box -> box`.

use serde::Serialize;

use crate::error::{Result, TarskiError};
use crate::lattice::{GridBox, Point};
use crate::oracle::{box_restriction, slice_oracle, FnOracle, QueryStats, DEBUG_LABEL};
use crate::star::{solve_star, Check, Polarity, SolveContext};

/// Volume limit for exhaustive sweeps.
pub const SWEEP_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TarskiResult {
    pub point: Point,
    /// Iterations of the outer loop (shrinking rounds or top-level
    /// bisection steps).
    pub rounds: u64,
    pub stats: QueryStats,
}

/// Checks `f(x) = x` with an evaluation that bypasses the cache and counters.
pub fn verify_fixed_point(f: &FnOracle, x: &Point) -> bool {
    f.domain().contains(x) && &f.fresh_eval(x) == x
}

fn finish(f: &FnOracle, point: Point, rounds: u64) -> Result<TarskiResult> {
    if !verify_fixed_point(f, &point) {
        return Err(TarskiError::Contract(format!(
            "{point} was returned but f{point} = {}",
            f.fresh_eval(&point)
        )));
    }
    Ok(TarskiResult {
        point,
        rounds,
        stats: f.stats().clone(),
    })
}

/// Shrinks `[ℓ, r]` (kept with `ℓ ⪯ f(ℓ)` and `f(r) ⪯ r`) by slicing the
/// widest dimension at its midpoint and solving the sliced sign oracle: a
/// nonpos answer `q` is prefixed and becomes `r`, a nonneg one becomes `ℓ`.
/// Stops once every side is at most 3 and sweeps the remaining box.
pub fn solve_tarski(f: &mut FnOracle, ctx: &mut SolveContext) -> Result<TarskiResult> {
    let dom = f.domain().clone();
    let mut l = dom.lo().clone();
    let mut r = dom.hi().clone();
    let mut rounds = 0u64;
    loop {
        if ctx.config.debug_checks {
            check_brackets(f, &l, &r, ctx)?;
        }
        let (i, gap) = (0..dom.dim())
            .map(|i| (i, r[i] - l[i]))
            .fold((0, i64::MIN), |best, c| if c.1 > best.1 { c } else { best });
        if gap <= 2 {
            break;
        }
        let v = (l[i] + r[i] + 1).div_euclid(2);
        let (q, polarity) = if dom.dim() == 1 {
            let q = Point::new(vec![v]);
            let y = f.eval(&q)?;
            let polarity = if y[0] <= v {
                Polarity::Nonpos
            } else {
                Polarity::Nonneg
            };
            (q, polarity)
        } else {
            let sub = GridBox::new(l.without(i), r.without(i))?;
            let mut slice = slice_oracle(f, i, v)?;
            let mut restricted = box_restriction(&mut slice, sub, ctx.config.debug_checks)?;
            let sol = solve_star(&mut restricted, ctx)?;
            (sol.point.with_inserted(i, v), sol.polarity)
        };
        match polarity {
            Polarity::Nonpos => r = q,
            Polarity::Nonneg => l = q,
        }
        rounds += 1;
    }
    let rest = GridBox::new(l, r)?;
    match brute_force_fixed_point(f, &rest)? {
        Some(x) => finish(f, x, rounds),
        None => Err(TarskiError::invalid(format!(
            "no fixed point in {rest}; f is not monotone"
        ))),
    }
}

fn check_brackets(f: &mut FnOracle, l: &Point, r: &Point, ctx: &mut SolveContext) -> Result<()> {
    let fl = f.eval_labeled(l, DEBUG_LABEL)?;
    let fr = f.eval_labeled(r, DEBUG_LABEL)?;
    let ok = l.precedes(r) && l.precedes(&fl) && fr.precedes(r);
    ctx.trace.record(Check::OuterLoop, ok, || {
        format!("bracket {l}..{r} has f(l) = {fl}, f(r) = {fr}")
    });
    if ok {
        Ok(())
    } else {
        Err(TarskiError::invalid(format!(
            "bracket {l}..{r} lost its certificates: f(l) = {fl}, f(r) = {fr}"
        )))
    }
}

fn check_sweep(f: &FnOracle, b: &GridBox) -> Result<()> {
    if !b.is_subbox_of(f.domain()) {
        return Err(TarskiError::usage(format!(
            "{b} is not inside {}",
            f.domain()
        )));
    }
    match b.volume() {
        Some(v) if v <= SWEEP_CAP => Ok(()),
        _ => Err(TarskiError::usage(format!(
            "{b} has more than {SWEEP_CAP} points to sweep"
        ))),
    }
}

/// First fixed point of `f` in `b` in row-major order.
pub fn brute_force_fixed_point(f: &mut FnOracle, b: &GridBox) -> Result<Option<Point>> {
    check_sweep(f, b)?;
    for x in b.iter() {
        if f.eval(&x)? == x {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Every fixed point of `f` in `b`, in row-major order.
pub fn all_fixed_points(f: &mut FnOracle, b: &GridBox) -> Result<Vec<Point>> {
    check_sweep(f, b)?;
    let mut out = Vec::new();
    for x in b.iter() {
        if f.eval(&x)? == x {
            out.push(x);
        }
    }
    if out.is_empty() {
        return Err(TarskiError::invalid(format!(
            "f has no fixed point in {b}; it is not monotone"
        )));
    }
    Ok(out)
}

/// Brute force over the whole box, as a [`TarskiResult`].
pub fn solve_tarski_brute(f: &mut FnOracle) -> Result<TarskiResult> {
    let dom = f.domain().clone();
    match brute_force_fixed_point(f, &dom)? {
        Some(x) => finish(f, x, 0),
        None => Err(TarskiError::invalid(
            "f has no fixed point; it is not monotone",
        )),
    }
}

/// Coordinate-recursive bisection, `O(log^k n)` queries.
///
/// To fix coordinates `0..d` with the rest pinned to `suffix`, bisect
/// coordinate `d - 1`: at value `v`, recursively fix `0..d-1`, then compare
/// `f(x)_{d-1}` with `v`. Above `v`, `f(x)` is a new lower bracket; below,
/// a new upper bracket. Both strictly pass `v`, so the search halves.
pub fn solve_tarski_dqy(f: &mut FnOracle) -> Result<TarskiResult> {
    let dom = f.domain().clone();
    let mut rounds = 0;
    let x = dqy(
        f,
        dom.dim(),
        dom.lo().coords().to_vec(),
        dom.hi().coords().to_vec(),
        &[],
        &mut rounds,
    )?;
    finish(f, Point::new(x), rounds)
}

fn dqy(
    f: &mut FnOracle,
    d: usize,
    mut l: Vec<i64>,
    mut r: Vec<i64>,
    suffix: &[i64],
    rounds: &mut u64,
) -> Result<Vec<i64>> {
    if d == 0 {
        return Ok(Vec::new());
    }
    let j = d - 1;
    loop {
        if l[j] > r[j] {
            return Err(TarskiError::invalid(format!(
                "coordinate {} bracket {}..={} became empty; f is not monotone",
                j + 1,
                l[j],
                r[j]
            )));
        }
        let v = (l[j] + r[j]).div_euclid(2);
        let inner_suffix: Vec<i64> = std::iter::once(v).chain(suffix.iter().copied()).collect();
        let mut x = dqy(
            f,
            j,
            l[..j].to_vec(),
            r[..j].to_vec(),
            &inner_suffix,
            rounds,
        )?;
        x.push(v);
        let full: Vec<i64> = x.iter().chain(suffix).copied().collect();
        let y = f.eval(&Point::new(full))?;
        if suffix.is_empty() {
            *rounds += 1;
        }
        let head = y.coords()[..d].to_vec();
        match y[j].cmp(&v) {
            std::cmp::Ordering::Equal => return Ok(x),
            std::cmp::Ordering::Greater => l = head,
            std::cmp::Ordering::Less => r = head,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_constant_shift, gen_hidden_point, gen_random_steps};
    use crate::oracle::MapFn;
    use crate::star::SolverConfig;

    fn debug_ctx() -> SolveContext {
        SolveContext::new(SolverConfig::default().with_debug_checks(true))
    }

    #[test]
    fn hidden_point_is_found_exactly() {
        let b = GridBox::cube(3, 3).unwrap();
        for p in b.iter() {
            let mut f = gen_hidden_point(b.clone(), p.clone()).unwrap();
            assert_eq!(solve_tarski(&mut f, &mut debug_ctx()).unwrap().point, p);
            let mut f = gen_hidden_point(b.clone(), p.clone()).unwrap();
            assert_eq!(solve_tarski_dqy(&mut f).unwrap().point, p);
        }
        let b = GridBox::cube(4, 3).unwrap();
        let mut f = gen_hidden_point(b, Point::from([1, 4, 2])).unwrap();
        assert_eq!(
            solve_tarski_dqy(&mut f).unwrap().point,
            Point::from([1, 4, 2])
        );
    }

    #[test]
    fn identity_and_constant() {
        let b = GridBox::cube(9, 3).unwrap();
        let mut id = FnOracle::from_map(MapFn::new(b.clone(), |x: &Point| x.clone()));
        let res = solve_tarski(&mut id, &mut debug_ctx()).unwrap();
        assert!(verify_fixed_point(&id, &res.point));
        let mut c = FnOracle::from_map(MapFn::new(b, |_: &Point| Point::from([2, 7, 5])));
        assert_eq!(
            solve_tarski(&mut c, &mut debug_ctx()).unwrap().point,
            Point::from([2, 7, 5])
        );
    }

    #[test]
    fn brute_force_examples() {
        let b = GridBox::cube(2, 2).unwrap();
        let mut id = FnOracle::from_map(MapFn::new(b.clone(), |x: &Point| x.clone()));
        assert_eq!(
            brute_force_fixed_point(&mut id, &b).unwrap(),
            Some(Point::from([1, 1]))
        );
        let b3 = GridBox::cube(3, 2).unwrap();
        let mut hp = gen_hidden_point(b3.clone(), Point::from([2, 2])).unwrap();
        assert_eq!(
            brute_force_fixed_point(&mut hp, &b3).unwrap(),
            Some(Point::from([2, 2]))
        );
        let mut up = gen_constant_shift(b3.clone(), vec![1, 1]).unwrap();
        assert_eq!(
            brute_force_fixed_point(&mut up, &b3).unwrap(),
            Some(Point::from([3, 3]))
        );
        let mut mixed = gen_constant_shift(b3.clone(), vec![1, -1]).unwrap();
        assert_eq!(
            all_fixed_points(&mut mixed, &b3).unwrap(),
            vec![Point::from([3, 1])]
        );
        let line = GridBox::cube(2, 1).unwrap();
        let mut id1 = FnOracle::from_map(MapFn::new(line.clone(), |x: &Point| x.clone()));
        assert_eq!(all_fixed_points(&mut id1, &line).unwrap().len(), 2);
    }

    #[test]
    fn one_dimensional_maps() {
        for n in [1i64, 2, 3, 10, 1000] {
            let b = GridBox::cube(n, 1).unwrap();
            for p in [1, (n + 1) / 2, n] {
                let mut f = gen_hidden_point(b.clone(), Point::from([p])).unwrap();
                assert_eq!(
                    solve_tarski(&mut f, &mut debug_ctx()).unwrap().point,
                    Point::from([p])
                );
                let mut f = gen_hidden_point(b.clone(), Point::from([p])).unwrap();
                let res = solve_tarski_dqy(&mut f).unwrap();
                assert_eq!(res.point, Point::from([p]));
                let bound = (n as f64).log2().ceil() as u64 + 2;
                assert!(res.stats.distinct_queries <= bound, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn random_steps_agree_with_the_fixed_point_set() {
        for seed in 0..30 {
            let b = GridBox::from_sides(&[5, 4, 6]).unwrap();
            let mut all = gen_random_steps(b.clone(), seed, 6).unwrap();
            let fixed = all_fixed_points(&mut all, &b).unwrap();
            let mut f = gen_random_steps(b.clone(), seed, 6).unwrap();
            let mut ctx = debug_ctx();
            let res = solve_tarski(&mut f, &mut ctx).unwrap();
            assert!(fixed.contains(&res.point), "seed {seed}");
            assert_eq!(ctx.trace.total_violations(), 0);
            let mut f = gen_random_steps(b, seed, 6).unwrap();
            assert!(fixed.contains(&solve_tarski_dqy(&mut f).unwrap().point));
        }
    }

    #[test]
    fn non_monotone_map_is_reported() {
        let b = GridBox::cube(2, 1).unwrap();
        let mut swap =
            FnOracle::from_map(MapFn::new(b.clone(), |x: &Point| Point::from([3 - x[0]])));
        assert!(all_fixed_points(&mut swap, &b).is_err());
        assert!(solve_tarski_brute(&mut swap).is_err());
    }
}
