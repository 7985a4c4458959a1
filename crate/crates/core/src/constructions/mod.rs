//! Valid schedules for instances whose periods take at most three distinct
//! values and whose density is at most 5/6.
//!
//! The pipeline folds equal periods together, sorts, raises the density to
//! exactly 5/6 by lowering the largest period, picks a construction for
//! the resulting one-, two- or three-period instance, and finally splits
//! folded tasks back into round-robin copies. Lowering periods and folding
//! both preserve validity in the direction we need, and every result is
//! re-checked against the caller's instance before it is returned.

mod fixtures;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::checker::{self, CheckError, Verdict};
use crate::model::{normalize, rat, CyclicSchedule, FoldError, FoldPlan, Instance, Rational};
use crate::regions::{Point, Region};

pub use fixtures::{fixture, fixture_table, two_period_anchor_for, AnchorPeriod, CaseId, Fixture};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("period {a1} is outside the range this construction handles")]
    OutOfRange { a1: Rational },
    #[error("lowering the largest period to reach density {target} gives {computed}, below the next period {next}")]
    NotShrinkable {
        target: Rational,
        computed: Rational,
        next: Rational,
    },
    #[error("density {density} exceeds the target {target}")]
    DensityAboveTarget { density: Rational, target: Rational },
    #[error("generated day sets do not partition the period at day {day}")]
    PartitionViolation { day: usize },
    #[error("frequency point {0} is not in J")]
    NotInJ(Point),
    #[error("{}", out_of_scope_message(.density, .distinct))]
    OutOfScope { density: Rational, distinct: usize },
    #[error("constructed schedule {schedule} failed verification for {instance}: {verdict:?}")]
    SelfVerificationFailed {
        schedule: String,
        instance: String,
        verdict: Verdict,
    },
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn out_of_scope_message(density: &Rational, distinct: &usize) -> String {
    if *density > Rational::one() {
        format!("density {density} exceeds 1, so no valid schedule exists")
    } else if *density > five_sixths() {
        format!("density {density} exceeds 5/6; no construction applies")
    } else {
        format!("{distinct} distinct periods; constructions handle at most 3")
    }
}

pub fn five_sixths() -> Rational {
    rat(5, 6)
}

/// Lowers the largest period of a sorted, distinct instance so that the
/// density becomes exactly `target`.
pub fn shrink_to_exact(
    instance: &Instance,
    target: &Rational,
) -> Result<Instance, ConstructionError> {
    let density = instance.density();
    if density > *target {
        return Err(ConstructionError::DensityAboveTarget {
            density,
            target: target.clone(),
        });
    }
    let k = instance.k();
    let last = instance.period(k);
    let rest = density - last.recip();
    let computed = (target - &rest).recip();
    if k >= 2 && computed < *instance.period(k - 1) {
        return Err(ConstructionError::NotShrinkable {
            target: target.clone(),
            computed,
            next: instance.period(k - 1).clone(),
        });
    }
    Ok(instance
        .with_period(k, computed)
        .expect("shrunk period is at least the next one"))
}

/// Schedule for `(a1, 1/(5/6 - 1/a1))`, lowest applicable case first.
pub fn two_period_schedule(a1: &Rational) -> Result<(CaseId, CyclicSchedule), ConstructionError> {
    let case = if *a1 <= rat(6, 5) || *a1 > rat(3, 1) {
        return Err(ConstructionError::OutOfRange { a1: a1.clone() });
    } else if *a1 <= rat(3, 2) {
        CaseId::TwoI
    } else if *a1 <= rat(2, 1) {
        CaseId::TwoII
    } else {
        CaseId::TwoIII
    };
    Ok((case, fixture(case).expect("two-period fixture").template))
}

/// The case-I schedule of period `2·p1` for `a1 = p1/q1`: task 1 on days
/// `⌈j·a1⌉ - 1`, and with `b = 2/(1 - 1/a1)`, task 2 on days `⌊j·b⌋` and
/// task 3 on days `⌊(j + 1/2)·b⌋`.
pub fn beatty_schedule(a1: &Rational) -> Result<CyclicSchedule, ConstructionError> {
    if *a1 <= rat(6, 5) {
        return Err(ConstructionError::OutOfRange { a1: a1.clone() });
    }
    let (p1, q1) = a1
        .to_u64_parts()
        .ok_or_else(|| ConstructionError::OutOfRange { a1: a1.clone() })?;
    let n = 2 * p1;
    let r = p1 - q1;
    let mut slots = vec![0usize; n as usize];
    let mut place = |day: u64, task: usize| -> Result<(), ConstructionError> {
        let slot = &mut slots[day as usize];
        if *slot != 0 {
            return Err(ConstructionError::PartitionViolation { day: day as usize });
        }
        *slot = task;
        Ok(())
    };
    for j in 1..=2 * q1 {
        place((j * p1).div_ceil(q1) - 1, 1)?;
    }
    // b = 2·p1 / r, so ⌊j·b⌋ = ⌊2·j·p1 / r⌋ and ⌊(j + 1/2)·b⌋ = ⌊(2j + 1)·p1 / r⌋
    for j in 0..r {
        place(2 * j * p1 / r, 2)?;
        place((2 * j + 1) * p1 / r, 3)?;
    }
    if let Some(day) = slots.iter().position(|&s| s == 0) {
        return Err(ConstructionError::PartitionViolation { day });
    }
    Ok(CyclicSchedule::new(slots).expect("every day assigned"))
}

/// Smallest `i` with `(1/a1, 1/a2) ∈ M_i`, for points of `J`.
pub fn classify_case(a1: &Rational, a2: &Rational) -> Result<CaseId, ConstructionError> {
    let p = Point::from_periods(a1, a2);
    if !Region::j().contains(&p) {
        return Err(ConstructionError::NotInJ(p));
    }
    let i = (1..=7)
        .find(|&i| Region::m(i).contains(&p))
        .expect("J is covered by M1..M7");
    Ok(CaseId::from_region_index(i).unwrap())
}

/// Schedule for `(a1, a2, 1/(5/6 - 1/a1 - 1/a2))`.
pub fn three_period_schedule(
    a1: &Rational,
    a2: &Rational,
) -> Result<(CaseId, CyclicSchedule), ConstructionError> {
    let case = classify_case(a1, a2)?;
    let schedule = match case {
        CaseId::I => beatty_schedule(a1)?,
        c => fixture(c).expect("three-period fixture").template,
    };
    Ok((case, schedule))
}

/// Replays `plan` backward on a schedule for the folded instance. Each
/// merged task's occurrences are dealt to its copies in turn; the schedule
/// is first repeated just enough times for the dealing to line up across
/// the period boundary.
pub fn expand(schedule: &CyclicSchedule, plan: &FoldPlan) -> CyclicSchedule {
    plan.steps.iter().rev().fold(schedule.clone(), |s, step| {
        let m = step.multiplicity;
        let c = s.occurrences(step.replacement);
        let reps = m / c.gcd(&m);
        let mut turn = 0;
        s.repeated(reps).relabeled(|task| {
            if task == step.replacement {
                let copy = step.members[turn % m];
                turn += 1;
                copy
            } else {
                step.origin[task - 1]
            }
        })
    })
}

/// One stage of [`schedule`]'s pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    Fold {
        period: Rational,
        multiplicity: usize,
        folded_period: Rational,
    },
    Distinct {
        periods: Instance,
    },
    Shrink {
        from: Rational,
        to: Rational,
    },
    Lower {
        from: Rational,
        to: Rational,
    },
    Single,
    Case {
        case: CaseId,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CaseTrace {
    pub steps: Vec<TraceStep>,
}

impl CaseTrace {
    pub fn cases(&self) -> Vec<CaseId> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                TraceStep::Case { case } => Some(*case),
                _ => None,
            })
            .collect()
    }

    pub fn fold_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, TraceStep::Fold { .. }))
            .count()
    }
}

/// Builds a valid schedule for an instance with at most three distinct
/// periods and density at most 5/6.
pub fn schedule(instance: &Instance) -> Result<(CyclicSchedule, CaseTrace), ConstructionError> {
    let density = instance.density();
    let distinct = instance.distinct_values().len();
    let out_of_scope = || ConstructionError::OutOfScope {
        density: density.clone(),
        distinct,
    };
    if density > Rational::one() || distinct > 3 {
        return Err(out_of_scope());
    }
    // above 5/6 only instances that fold down to a single task are handled
    if density > five_sixths() && normalize(instance).map_or(true, |(f, _)| f.k() != 1) {
        return Err(out_of_scope());
    }
    let mut trace = CaseTrace::default();
    let s = build(instance, &mut trace)?;
    match checker::verify(&s, instance)? {
        Verdict::Valid => Ok((s, trace)),
        verdict => Err(ConstructionError::SelfVerificationFailed {
            schedule: s.to_string(),
            instance: instance.to_string(),
            verdict,
        }),
    }
}

fn build(instance: &Instance, trace: &mut CaseTrace) -> Result<CyclicSchedule, ConstructionError> {
    let (folded, plan) = normalize(instance)?;
    trace
        .steps
        .extend(plan.steps.iter().map(|s| TraceStep::Fold {
            period: s.period.clone(),
            multiplicity: s.multiplicity,
            folded_period: s.folded_period.clone(),
        }));
    let (canon, perm) = folded.canonical();
    trace.steps.push(TraceStep::Distinct {
        periods: canon.clone(),
    });
    let target = five_sixths();

    let base = match canon.k() {
        1 => {
            trace.steps.push(TraceStep::Single);
            CyclicSchedule::from_digits("1")
        }
        2 => match shrink_to_exact(&canon, &target) {
            Ok(shrunk) => {
                record_shrink(trace, &canon, &shrunk);
                let (case, s) = two_period_schedule(canon.period(1))?;
                trace.steps.push(TraceStep::Case { case });
                s
            }
            Err(ConstructionError::NotShrinkable { .. }) => lower_and_rebuild(&canon, trace)?,
            Err(e) => return Err(e),
        },
        3 => match shrink_to_exact(&canon, &target) {
            // equality would leave the point on the boundary of J
            Ok(shrunk) if shrunk.period(3) > shrunk.period(2) => {
                record_shrink(trace, &canon, &shrunk);
                let (case, s) = three_period_schedule(canon.period(1), canon.period(2))?;
                trace.steps.push(TraceStep::Case { case });
                s
            }
            Ok(_) | Err(ConstructionError::NotShrinkable { .. }) => {
                lower_and_rebuild(&canon, trace)?
            }
            Err(e) => return Err(e),
        },
        _ => {
            return Err(ConstructionError::OutOfScope {
                density: instance.density(),
                distinct: canon.k(),
            })
        }
    };
    let unsorted = base.relabeled(|j| perm[j - 1]);
    Ok(expand(&unsorted, &plan))
}

fn record_shrink(trace: &mut CaseTrace, before: &Instance, after: &Instance) {
    let k = before.k();
    if before.period(k) != after.period(k) {
        trace.steps.push(TraceStep::Shrink {
            from: before.period(k).clone(),
            to: after.period(k).clone(),
        });
    }
}

/// Lowers the largest period of a sorted instance to the next one, which
/// creates a pair to fold, and builds for that instead.
fn lower_and_rebuild(
    canon: &Instance,
    trace: &mut CaseTrace,
) -> Result<CyclicSchedule, ConstructionError> {
    let k = canon.k();
    let to = canon.period(k - 1).clone();
    trace.steps.push(TraceStep::Lower {
        from: canon.period(k).clone(),
        to: to.clone(),
    });
    let lowered = canon.with_period(k, to).expect("period stays at least 1");
    build(&lowered, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::is_valid;
    use crate::model::parse_instance;

    fn inst(t: &str) -> Instance {
        parse_instance(t).unwrap()
    }

    #[test]
    fn shrink_fixtures() {
        let t = five_sixths();
        assert_eq!(
            shrink_to_exact(&inst("3/2,100"), &t).unwrap(),
            inst("3/2,6")
        );
        assert_eq!(
            shrink_to_exact(&inst("2,4,100"), &t).unwrap(),
            inst("2,4,12")
        );
        assert_eq!(shrink_to_exact(&inst("2,3"), &t).unwrap(), inst("2,3"));
        assert!(matches!(
            shrink_to_exact(&inst("3,7"), &t),
            Err(ConstructionError::NotShrinkable { .. })
        ));
        assert!(matches!(
            shrink_to_exact(&inst("6/5,6"), &t),
            Err(ConstructionError::DensityAboveTarget { .. })
        ));
    }

    #[test]
    fn two_period_cases() {
        let (c, s) = two_period_schedule(&(rat(6, 5) + rat(1, 100))).unwrap();
        assert_eq!((c, s.to_string()), (CaseId::TwoI, "111112".into()));
        let (c, s) = two_period_schedule(&rat(2, 1)).unwrap();
        assert_eq!((c, s.to_string()), (CaseId::TwoII, "112".into()));
        let (c, s) = two_period_schedule(&rat(12, 5)).unwrap();
        assert_eq!((c, s.to_string()), (CaseId::TwoIII, "12".into()));
        assert!(two_period_schedule(&rat(6, 5)).is_err());
        assert!(two_period_schedule(&rat(31, 10)).is_err());
    }

    #[test]
    fn beatty_fixtures() {
        let s = beatty_schedule(&rat(2, 1)).unwrap();
        assert_eq!(s.to_string(), "2131");
        assert!(is_valid(&s, &inst("2,4,12")));
        let s = beatty_schedule(&rat(3, 2)).unwrap();
        assert_eq!(s.to_string(), "211311");
        assert!(is_valid(&s, &inst("3/2,6,6")));
        assert!(matches!(
            beatty_schedule(&rat(6, 5)),
            Err(ConstructionError::OutOfRange { .. })
        ));
    }

    #[test]
    fn classify_fixtures() {
        assert_eq!(classify_case(&rat(2, 1), &rat(4, 1)).unwrap(), CaseId::I);
        assert_eq!(
            classify_case(&rat(100, 63), &rat(100, 19)).unwrap(),
            CaseId::II
        );
        // also in M7, but M6 comes first
        assert_eq!(classify_case(&rat(12, 5), &rat(5, 2)).unwrap(), CaseId::VI);
        assert_eq!(
            classify_case(&rat(5, 2), &rat(50, 17)).unwrap(),
            CaseId::VII
        );
        assert!(matches!(
            classify_case(&rat(3, 1), &rat(3, 1)),
            Err(ConstructionError::NotInJ(_))
        ));
    }

    #[test]
    fn three_period_fixtures() {
        let (c, s) = three_period_schedule(&rat(2, 1), &rat(4, 1)).unwrap();
        assert_eq!((c, s.to_string()), (CaseId::I, "2131".into()));
        let (c, s) = three_period_schedule(&rat(100, 63), &rat(100, 19)).unwrap();
        assert_eq!((c, s.to_string()), (CaseId::II, "112112113".into()));
        assert!(is_valid(&s, &inst("100/63,100/19,75")));
        let (c, s) = three_period_schedule(&rat(12, 5), &rat(5, 2)).unwrap();
        assert_eq!((c, s.to_string()), (CaseId::VI, "121211212123".into()));
        assert!(is_valid(&s, &inst("12/5,5/2,60")));
        let vii = fixture(CaseId::VII).unwrap().template;
        assert!(is_valid(&vii, &inst("12/5,5/2,60")));
    }

    #[test]
    fn expand_fixtures() {
        let a = inst("2,4,4");
        let (folded, plan) = normalize(&a).unwrap();
        assert_eq!(folded, inst("1"));
        let s = expand(&CyclicSchedule::from_digits("1"), &plan);
        assert_eq!(s.to_string(), "1213");

        let a = inst("3/2,9,9,9");
        let (folded, plan) = normalize(&a).unwrap();
        assert_eq!(folded, inst("3/2,3"));
        let s = expand(&CyclicSchedule::from_digits("112"), &plan);
        assert_eq!(s.to_string(), "112113114");
        assert!(is_valid(&s, &a));

        let s = CyclicSchedule::from_digits("12");
        assert_eq!(expand(&s, &FoldPlan::default()), s);
    }

    #[test]
    fn schedule_fixtures() {
        let (s, trace) = schedule(&inst("2,4,4")).unwrap();
        assert!(is_valid(&s, &inst("2,4,4")));
        assert_eq!(trace.fold_count(), 2);
        assert!(trace.steps.contains(&TraceStep::Single));

        let (s, trace) = schedule(&inst("2,7/2")).unwrap();
        assert_eq!(s.to_string(), "112");
        assert_eq!(trace.cases(), vec![CaseId::TwoII]);

        let (s, trace) = schedule(&inst("3/2,7,42")).unwrap();
        assert_eq!(trace.cases(), vec![CaseId::I]);
        assert_eq!(s.len(), 6);

        match schedule(&inst("6/5,6,100")) {
            Err(e @ ConstructionError::OutOfScope { .. }) => {
                assert!(e.to_string().contains("exceeds 1"), "{e}")
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            schedule(&inst("3/2,7,6")),
            Err(ConstructionError::OutOfScope { .. })
        ));
        assert!(matches!(
            schedule(&inst("5,6,7,8")),
            Err(ConstructionError::OutOfScope { distinct: 4, .. })
        ));
    }

    #[test]
    fn fold_down_paths() {
        // 1/a1 + 2/a2 < 5/6 sends three periods through the lowering step
        let a = inst("3,7,100");
        let (s, trace) = schedule(&a).unwrap();
        assert!(is_valid(&s, &a));
        assert!(trace
            .steps
            .iter()
            .any(|t| matches!(t, TraceStep::Lower { .. })));
        // a1 > 12/5 with two periods
        let a = inst("5/2,11");
        let (s, trace) = schedule(&a).unwrap();
        assert!(is_valid(&s, &a));
        assert!(trace
            .steps
            .iter()
            .any(|t| matches!(t, TraceStep::Lower { .. })));
        // boundary 1/a1 + 2/a2 = 5/6 exactly
        let a = inst("2,6,50");
        let (s, _) = schedule(&a).unwrap();
        assert!(is_valid(&s, &a));
    }

    #[test]
    fn user_order_is_kept() {
        let a = inst("24,2,7,24");
        let (s, _) = schedule(&a).unwrap_or_else(|e| panic!("{e}"));
        assert!(is_valid(&s, &a));
    }
}
