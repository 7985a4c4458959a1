//! Validity of a cyclic schedule under the real-period window condition.
//!
//! A task of period `a` must appear at least `l` times in every
//! `⌈l·a⌉` consecutive days, for every `l ≥ 1`. With `a = p/q` in lowest
//! terms only `l ≤ q` needs checking: for `l = u·q + r` the window
//! `⌈l·a⌉ = u·p + ⌈r·a⌉` splits into `u` windows of `p` days (each holding
//! `q` occurrences) followed by one window of `⌈r·a⌉` days (holding `r`).

use serde::Serialize;
use thiserror::Error;

use crate::model::{CyclicSchedule, Instance, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("schedule uses task {task} but the instance has only {k} tasks")]
    TaskIndexOutOfRange { task: usize, k: usize },
    #[error("period {0} is too large to check")]
    PeriodTooLarge(Rational),
}

/// A violated window: starting at day `m`, the `window_length =
/// ⌈l·a_task⌉` days contain only `found < l` occurrences of `task`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub task: usize,
    pub l: u64,
    pub m: usize,
    pub window_length: u64,
    pub found: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Valid => None,
            Verdict::Counterexample(c) => Some(c),
        }
    }
}

/// Occurrence counts of a single task over every cyclic window of a fixed
/// schedule.
struct TaskWindows {
    n: usize,
    per_period: u64,
    // prefix[t] = occurrences in slots[0..t] over two copies of the period
    prefix: Vec<u64>,
}

impl TaskWindows {
    fn new(schedule: &CyclicSchedule, task: usize) -> Self {
        let slots = schedule.slots();
        let n = slots.len();
        let mut prefix = Vec::with_capacity(2 * n + 1);
        prefix.push(0);
        for t in 0..2 * n {
            let hit = (slots[t % n] == task) as u64;
            prefix.push(prefix[t] + hit);
        }
        TaskWindows {
            n,
            per_period: prefix[n],
            prefix,
        }
    }

    /// Occurrences in days `[m, m + y)`.
    fn count(&self, m: usize, y: u64) -> u64 {
        let full = y / self.n as u64;
        let rem = (y % self.n as u64) as usize;
        full * self.per_period + self.prefix[m + rem] - self.prefix[m]
    }

    fn min_count(&self, y: u64) -> u64 {
        (0..self.n).map(|m| self.count(m, y)).min().unwrap_or(0)
    }
}

/// Fewest occurrences of `task` in any `y` consecutive days.
pub fn window_min_count(schedule: &CyclicSchedule, task: usize, y: u64) -> u64 {
    TaskWindows::new(schedule, task).min_count(y)
}

fn check_task(
    schedule: &CyclicSchedule,
    task: usize,
    period: &Rational,
) -> Result<Option<Counterexample>, CheckError> {
    let (p, q) = period
        .to_u64_parts()
        .ok_or_else(|| CheckError::PeriodTooLarge(period.clone()))?;
    let windows = TaskWindows::new(schedule, task);
    for l in 1..=q {
        let window_length = (l * p).div_ceil(q);
        if windows.min_count(window_length) >= l {
            continue;
        }
        let (m, found) = (0..windows.n)
            .map(|m| (m, windows.count(m, window_length)))
            .find(|&(_, c)| c < l)
            .expect("minimum below l");
        return Ok(Some(Counterexample {
            task,
            l,
            m,
            window_length,
            found,
        }));
    }
    Ok(None)
}

/// Decides validity of `schedule` for `instance`. On failure the
/// counterexample with the smallest `(task, l, m)` is reported.
pub fn verify(schedule: &CyclicSchedule, instance: &Instance) -> Result<Verdict, CheckError> {
    let k = instance.k();
    if let Some(task) = schedule.slots().iter().copied().find(|&s| s > k) {
        return Err(CheckError::TaskIndexOutOfRange { task, k });
    }
    for (i, period) in instance.periods().iter().enumerate() {
        if let Some(c) = check_task(schedule, i + 1, period)? {
            return Ok(Verdict::Counterexample(c));
        }
    }
    Ok(Verdict::Valid)
}

/// Shorthand for `verify(..)` reporting plain validity; out-of-range task
/// indices count as invalid.
pub fn is_valid(schedule: &CyclicSchedule, instance: &Instance) -> bool {
    matches!(verify(schedule, instance), Ok(Verdict::Valid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_instance, rat};
    use proptest::prelude::*;

    fn s(d: &str) -> CyclicSchedule {
        CyclicSchedule::from_digits(d)
    }

    fn brute_window_min(schedule: &CyclicSchedule, task: usize, y: u64) -> u64 {
        (0..schedule.len() as i64)
            .map(|m| {
                (m..m + y as i64)
                    .filter(|&t| schedule.task_on(t) == task)
                    .count() as u64
            })
            .min()
            .unwrap()
    }

    #[test]
    fn window_min_fixtures() {
        assert_eq!(window_min_count(&s("1213"), 1, 2), 1);
        assert_eq!(window_min_count(&s("111112"), 2, 6), 1);
        assert_eq!(window_min_count(&s("1213"), 3, 0), 0);
        assert_eq!(window_min_count(&s("1213"), 2, 9), 2);
    }

    #[test]
    fn verify_fixtures() {
        let inst = |t: &str| parse_instance(t).unwrap();
        assert!(verify(&s("1213"), &inst("2,4,4")).unwrap().is_valid());
        assert!(verify(&s("1112112"), &inst("2,7/2")).unwrap().is_valid());
        assert_eq!(
            verify(&s("1111212"), &inst("2,7/2")).unwrap(),
            Verdict::Counterexample(Counterexample {
                task: 2,
                l: 1,
                m: 0,
                window_length: 4,
                found: 0
            })
        );
        let v = verify(&s("112112113"), &inst("3/2,5,9")).unwrap();
        assert_eq!(v.counterexample().unwrap().task, 2);
    }

    #[test]
    fn out_of_range_task() {
        let a = Instance::new(vec![rat(2, 1), rat(2, 1)]).unwrap();
        assert_eq!(
            verify(&s("123"), &a),
            Err(CheckError::TaskIndexOutOfRange { task: 3, k: 2 })
        );
    }

    #[test]
    fn missing_task_fails_first_window() {
        let a = Instance::new(vec![rat(3, 2), rat(7, 1)]).unwrap();
        let c = verify(&s("1"), &a).unwrap();
        assert_eq!(c.counterexample().unwrap().task, 2);
        assert_eq!(c.counterexample().unwrap().window_length, 7);
    }

    fn schedule_and_instance() -> impl Strategy<Value = (CyclicSchedule, Instance)> {
        (1usize..=4)
            .prop_flat_map(|k| {
                (
                    prop::collection::vec(1..=k, 1..=12),
                    prop::collection::vec((1i64..=6, 0i64..=12), k),
                )
            })
            .prop_map(|(slots, per)| {
                let periods = per.iter().map(|&(q, extra)| rat(q + extra, q)).collect();
                (
                    CyclicSchedule::new(slots).unwrap(),
                    Instance::new(periods).unwrap(),
                )
            })
    }

    proptest! {
        #[test]
        fn window_min_matches_brute_force(
            slots in prop::collection::vec(1usize..=3, 1..=12),
            task in 1usize..=3,
            y in 0u64..40,
        ) {
            let sch = CyclicSchedule::new(slots).unwrap();
            prop_assert_eq!(window_min_count(&sch, task, y), brute_window_min(&sch, task, y));
        }

        #[test]
        fn windows_compose(
            slots in prop::collection::vec(1usize..=3, 1..=12),
            task in 1usize..=3,
            y1 in 0u64..30,
            y2 in 0u64..30,
        ) {
            let sch = CyclicSchedule::new(slots).unwrap();
            let a = window_min_count(&sch, task, y1);
            let b = window_min_count(&sch, task, y2);
            prop_assert!(window_min_count(&sch, task, y1 + y2) >= a + b);
        }

        #[test]
        fn raising_a_period_keeps_validity(
            (sch, inst) in schedule_and_instance(),
            which in 0usize..4,
            bump in (0i64..6, 1i64..6),
        ) {
            if verify(&sch, &inst).unwrap().is_valid() {
                let j = which % inst.k() + 1;
                let raised = inst.period(j) + &rat(bump.0, bump.1);
                let inst2 = inst.with_period(j, raised).unwrap();
                prop_assert!(verify(&sch, &inst2).unwrap().is_valid());
            }
        }

        #[test]
        fn integer_periods_need_only_single_windows(
            slots in prop::collection::vec(1usize..=3, 1..=12),
            per in prop::collection::vec(1i64..=8, 3),
        ) {
            let sch = CyclicSchedule::new(slots).unwrap();
            let inst = Instance::new(per.iter().map(|&p| rat(p, 1)).collect()).unwrap();
            let single = (1..=3).all(|i| {
                window_min_count(&sch, i, per[i - 1] as u64) >= 1
            });
            prop_assert_eq!(verify(&sch, &inst).unwrap().is_valid(), single);
        }
    }
}
