use std::collections::BTreeMap;

use pinwheel_core::checker::is_valid;
use pinwheel_core::constructions::{beatty_schedule, schedule, three_period_schedule, CaseId};
use pinwheel_core::model::{rat, Instance, Rational};
use pinwheel_core::regions::{Point, Region};
use proptest::prelude::*;

/// The exact-density instance `(1/x, 1/y, 1/(5/6 - x - y))` for a point of J.
fn instance_at(p: &Point) -> Instance {
    let rest = rat(5, 6) - &p.x - &p.y;
    Instance::new(vec![p.x.recip(), p.y.recip(), rest.recip()]).unwrap()
}

fn grid_points(n: i64) -> Vec<Point> {
    let j = Region::j();
    let mut out = Vec::new();
    for i in 1..n {
        for k in 1..n {
            let p = Point::new(rat(i, n), rat(k, n));
            if j.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

#[test]
fn every_case_appears_on_a_grid_over_j_and_verifies() {
    let mut hits: BTreeMap<CaseId, usize> = BTreeMap::new();
    for n in [60, 84, 120] {
        for p in grid_points(n) {
            let a = instance_at(&p);
            let (case, s) = three_period_schedule(a.period(1), a.period(2)).unwrap();
            assert!(is_valid(&s, &a), "{case:?} {s} invalid for ({a})");
            *hits.entry(case).or_default() += 1;
        }
    }
    for case in CaseId::THREE {
        assert!(
            hits.get(&case).copied().unwrap_or(0) > 0,
            "{case:?} never hit: {hits:?}"
        );
    }
}

#[test]
fn schedule_handles_grid_instances_with_slack() {
    // lengthen every period a little; the pipeline has to shrink back to J
    for p in grid_points(60) {
        let a = instance_at(&p);
        let bumped: Vec<Rational> = a.periods().iter().map(|v| v + &rat(1, 7)).collect();
        let b = Instance::new(bumped).unwrap();
        let (s, _) = schedule(&b).unwrap();
        assert!(is_valid(&s, &b), "{s} invalid for ({b})");
    }
}

fn point_in_j() -> impl Strategy<Value = Point> {
    (1i64..=60, 1i64..=60, 1i64..=60)
        .prop_map(|(i, k, d)| Point::new(rat(i, d + 60), rat(k, d + 60)))
        .prop_filter("inside J", |p| Region::j().contains(p))
}

proptest! {
    #[test]
    fn three_period_schedule_valid_on_j(p in point_in_j()) {
        let a = instance_at(&p);
        let (case, s) = three_period_schedule(a.period(1), a.period(2)).unwrap();
        prop_assert!(is_valid(&s, &a), "{:?} {} invalid for ({})", case, s, a);
    }

    #[test]
    fn beatty_partitions_and_serves_case_one(q in 1u64..=20, extra in 1u64..=50) {
        let a1 = rat((q + extra) as i64, q as i64);
        prop_assume!(a1 > rat(6, 5) && a1 <= rat(18, 5));
        let s = beatty_schedule(&a1).unwrap();
        // one task per day, two occurrences of task 1 per period of a1
        let (p1, q1) = a1.to_u64_parts().unwrap();
        prop_assert_eq!(s.len() as u64, 2 * p1);
        prop_assert_eq!(s.occurrences(1) as u64, 2 * q1);
        prop_assert_eq!(s.occurrences(2), s.occurrences(3));
    }

    #[test]
    fn schedule_output_is_valid_for_user_order(
        vals in prop::collection::vec((1i64..=12, 0i64..=36), 1..=3),
        mult in prop::collection::vec(1usize..=3, 3),
        rot in 0usize..9,
    ) {
        let mut periods = Vec::new();
        for ((q, extra), m) in vals.iter().zip(&mult) {
            for _ in 0..*m {
                periods.push(rat(q + extra, *q));
            }
        }
        let len = periods.len();
        periods.rotate_left(rot % len);
        let a = Instance::new(periods).unwrap();
        prop_assume!(a.density() <= rat(5, 6));
        let (s, _) = schedule(&a).unwrap();
        prop_assert!(is_valid(&s, &a), "{} invalid for ({})", s, a);
    }
}
