use proptest::prelude::*;

use tarski_core::bench::{run_cell, Algorithm};
use tarski_core::instances::{parse_instance, serialize_instance, Family, Instance, InstanceSpec};
use tarski_core::oracle::{
    box_restriction, collapse_last_down, collapse_last_up, slice_oracle, validate, FnOracle,
    SignOracle, ValidationMode,
};
use tarski_core::outer::{solve_tarski, solve_tarski_dqy};
use tarski_core::star::{solve_star, SolveContext, SolverConfig};
use tarski_core::{enumerate_box, glb, leq, lub, GridBox, Point};

fn points(dim: usize, count: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::collection::vec(-20i64..20, dim), 1..=count)
        .prop_map(|v| v.into_iter().map(Point::new).collect())
}

fn map_family() -> impl Strategy<Value = Family> {
    prop::sample::select(vec![
        Family::HiddenPoint,
        Family::ConstantShift,
        Family::RandomSteps,
        Family::CoupledPoint,
    ])
}

fn sides(dims: std::ops::RangeInclusive<usize>, max: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1..=max, dims)
}

fn map_oracle(spec: &InstanceSpec) -> FnOracle {
    match spec.instantiate().unwrap() {
        Instance::Map(f) => f,
        Instance::Sign(_) => unreachable!("map family"),
    }
}

proptest! {
    #[test]
    fn lub_and_glb_are_least_and_greatest_bounds(ps in points(3, 6), probe in points(3, 1)) {
        let u = lub(&ps).unwrap();
        let l = glb(&ps).unwrap();
        prop_assert!(ps.iter().all(|p| leq(p, &u).unwrap() && leq(&l, p).unwrap()));
        // Any other upper bound dominates the lub, any lower bound is below the glb.
        let z = &probe[0];
        if ps.iter().all(|p| p.precedes(z)) {
            prop_assert!(u.precedes(z));
        }
        if ps.iter().all(|p| z.precedes(p)) {
            prop_assert!(z.precedes(&l));
        }
        let mut rev = ps.clone();
        rev.reverse();
        prop_assert_eq!(lub(&rev).unwrap(), u.clone());
        prop_assert_eq!(lub([&u, &u]).unwrap(), u);
    }

    #[test]
    fn order_is_a_partial_order(a in points(2, 1), b in points(2, 1)) {
        let (a, b) = (&a[0], &b[0]);
        prop_assert!(leq(a, a).unwrap());
        if leq(a, b).unwrap() && leq(b, a).unwrap() {
            prop_assert_eq!(a, b);
        }
        prop_assert!(leq(&Point::new(vec![1]), b).is_err());
    }

    #[test]
    fn box_enumeration_is_row_major(s in sides(1..=3, 5)) {
        let b = GridBox::from_sides(&s).unwrap();
        let pts: Vec<Point> = enumerate_box(&b).collect();
        prop_assert_eq!(pts.len() as u64, b.volume().unwrap());
        for (i, p) in pts.iter().enumerate() {
            prop_assert_eq!(b.index_of(p), i as u64);
            prop_assert_eq!(&b.point_at(i as u64), p);
        }
        // Lexicographic order with the last coordinate fastest.
        prop_assert!(pts.windows(2).all(|w| w[0].coords() < w[1].coords()));
    }

    #[test]
    fn instance_documents_round_trip(family in map_family(), s in sides(1..=4, 9), seed in any::<u64>()) {
        let spec = InstanceSpec::sample(family, &s, seed, 5).unwrap();
        let back = parse_instance(&serialize_instance(&spec)).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn slices_and_collapses_are_valid_sign_oracles(
        family in map_family(),
        s in sides(2..=3, 6),
        seed in any::<u64>(),
        pick in any::<(usize, i64)>(),
    ) {
        let spec = InstanceSpec::sample(family, &s, seed, 6).unwrap();
        let mut f = map_oracle(&spec);
        let dim = pick.0 % s.len();
        let value = 1 + pick.1.rem_euclid(s[dim]);
        let mut g = slice_oracle(&mut f, dim, value).unwrap();
        prop_assert!(validate(&mut g, ValidationMode::exhaustive()).unwrap().is_ok());
        prop_assert!(validate(&mut collapse_last_up(&mut g), ValidationMode::exhaustive()).unwrap().is_ok());
        prop_assert!(validate(&mut collapse_last_down(&mut g), ValidationMode::exhaustive()).unwrap().is_ok());
    }

    /// Iterating `f` from the corners gives `ℓ ⪯ f(ℓ)` and `f(r) ⪯ r`; the
    /// slice restricted to `L_{ℓ,r}` must stay a valid sign oracle.
    #[test]
    fn restrictions_between_certified_corners_are_valid(
        family in map_family(),
        s in sides(3..=3, 6),
        seed in any::<u64>(),
        iters in 0usize..4,
        pick in any::<(usize, i64)>(),
    ) {
        let spec = InstanceSpec::sample(family, &s, seed, 6).unwrap();
        let map = spec.to_map().unwrap();
        let dom = map.domain().clone();
        let (mut l, mut r) = (dom.lo().clone(), dom.hi().clone());
        for _ in 0..iters {
            l = map.apply(&l);
            r = map.apply(&r);
        }
        let dim = pick.0 % 3;
        let value = l[dim] + pick.1.rem_euclid(r[dim] - l[dim] + 1);
        let mut f = map_oracle(&spec);
        let mut g = slice_oracle(&mut f, dim, value).unwrap();
        let sub = GridBox::new(l.without(dim), r.without(dim)).unwrap();
        let mut restricted = box_restriction(&mut g, sub, true).unwrap();
        prop_assert!(validate(&mut restricted, ValidationMode::exhaustive()).unwrap().is_ok());
    }

    #[test]
    fn solve_tarski_finds_a_fixed_point_within_the_round_bound(
        family in map_family(),
        s in sides(1..=4, 12),
        seed in any::<u64>(),
        debug in any::<bool>(),
    ) {
        let spec = InstanceSpec::sample(family, &s, seed, 6).unwrap();
        let map = spec.to_map().unwrap();
        let mut f = map_oracle(&spec);
        let mut ctx = SolveContext::new(SolverConfig::default().with_debug_checks(debug));
        let res = solve_tarski(&mut f, &mut ctx).unwrap();
        prop_assert_eq!(map.apply(&res.point), res.point.clone());
        let bound: u64 = s.iter().map(|&n| 64 - ((n - 1) as u64).leading_zeros() as u64).sum();
        prop_assert!(res.rounds <= bound, "{} rounds > {}", res.rounds, bound);
        prop_assert_eq!(ctx.trace.total_violations(), 0);
        let dqy = solve_tarski_dqy(&mut map_oracle(&spec)).unwrap();
        prop_assert_eq!(map.apply(&dqy.point), dqy.point);
    }

    #[test]
    fn value_caching_does_not_change_answers_or_counts(
        family in map_family(),
        s in sides(2..=4, 10),
        seed in any::<u64>(),
    ) {
        let spec = InstanceSpec::sample(family, &s, seed, 6).unwrap();
        let mut cached = map_oracle(&spec);
        let mut uncached = map_oracle(&spec);
        uncached.set_value_caching(false);
        let config = SolverConfig::default().with_debug_checks(false);
        let a = solve_tarski(&mut cached, &mut SolveContext::new(config)).unwrap();
        let b = solve_tarski(&mut uncached, &mut SolveContext::new(config)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn star_solutions_hold_their_polarity(s in sides(1..=4, 20), seed in any::<u64>()) {
        let spec = InstanceSpec::sample(Family::HiddenSignPoint, &s, seed, 0).unwrap();
        let Instance::Sign(mut o) = spec.instantiate().unwrap() else { unreachable!() };
        let sol = solve_star(&mut o, &mut SolveContext::new(SolverConfig::default())).unwrap();
        let fresh = o.fresh_eval(&sol.point);
        prop_assert_eq!(&fresh, &sol.signs);
        prop_assert!(fresh.is_uniform());
        prop_assert!(o.domain().contains(&sol.point));
    }

    #[test]
    fn bench_cells_are_deterministic(family in map_family(), n in 2i64..40, k in 1usize..4, seed in any::<u64>()) {
        let spec = InstanceSpec::sample(family, &vec![n; k], seed, 6).unwrap();
        for algo in [Algorithm::New, Algorithm::Dqy] {
            let config = SolverConfig::default();
            let (a, _) = run_cell(&spec, algo, config).unwrap();
            let (b, _) = run_cell(&spec, algo, config).unwrap();
            prop_assert!(a.valid);
            prop_assert_eq!(a.distinct_queries, b.distinct_queries);
            prop_assert_eq!(a.total_queries, b.total_queries);
        }
    }
}
