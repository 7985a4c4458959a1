use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least one task")]
    Empty,
    #[error("task {task} has period {period}, below 1")]
    PeriodBelowOne { task: usize, period: Rational },
}

/// A pinwheel instance: one period (≥ 1) per task, in the order the
/// user supplied them. Task `i` (1-based) has period `periods()[i - 1]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Instance {
    periods: Vec<Rational>,
}

impl Instance {
    pub fn new(periods: Vec<Rational>) -> Result<Self, InstanceError> {
        if periods.is_empty() {
            return Err(InstanceError::Empty);
        }
        if let Some((i, p)) = periods
            .iter()
            .enumerate()
            .find(|(_, p)| **p < Rational::one())
        {
            return Err(InstanceError::PeriodBelowOne {
                task: i + 1,
                period: p.clone(),
            });
        }
        Ok(Instance { periods })
    }

    pub fn periods(&self) -> &[Rational] {
        &self.periods
    }

    /// Number of tasks.
    pub fn k(&self) -> usize {
        self.periods.len()
    }

    /// Period of 1-based task `task`.
    pub fn period(&self, task: usize) -> &Rational {
        &self.periods[task - 1]
    }

    /// Sum of reciprocals of all periods.
    pub fn density(&self) -> Rational {
        self.periods.iter().map(Rational::recip).sum()
    }

    pub fn is_sorted(&self) -> bool {
        self.periods.windows(2).all(|w| w[0] <= w[1])
    }

    /// Canonical (non-decreasing, stable) form together with the
    /// permutation back to this instance: task `j` of the canonical
    /// instance is task `perm[j - 1]` here (both 1-based).
    pub fn canonical(&self) -> (Instance, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.k()).collect();
        order.sort_by(|&a, &b| self.periods[a].cmp(&self.periods[b]));
        let periods = order.iter().map(|&i| self.periods[i].clone()).collect();
        (
            Instance { periods },
            order.into_iter().map(|i| i + 1).collect(),
        )
    }

    /// Distinct period values in increasing order.
    pub fn distinct_values(&self) -> Vec<Rational> {
        let mut v = self.periods.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Copy with the period of 1-based task `task` replaced.
    pub fn with_period(&self, task: usize, period: Rational) -> Result<Self, InstanceError> {
        let mut periods = self.periods.clone();
        periods[task - 1] = period;
        Instance::new(periods)
    }
}

impl TryFrom<Vec<Rational>> for Instance {
    type Error = InstanceError;

    fn try_from(periods: Vec<Rational>) -> Result<Self, Self::Error> {
        Instance::new(periods)
    }
}

impl From<Instance> for Vec<Rational> {
    fn from(inst: Instance) -> Self {
        inst.periods
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.periods.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("a schedule needs at least one slot")]
    Empty,
    #[error("slot {slot} holds task 0; tasks are numbered from 1")]
    ZeroTask { slot: usize },
}

/// A periodic schedule `|s_0 s_1 … s_{n-1}|`: on day `t` task
/// `slots[t mod n]` is performed. Tasks are 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CyclicSchedule {
    slots: Vec<usize>,
}

impl CyclicSchedule {
    pub fn new(slots: Vec<usize>) -> Result<Self, ScheduleError> {
        if slots.is_empty() {
            return Err(ScheduleError::Empty);
        }
        if let Some(slot) = slots.iter().position(|&s| s == 0) {
            return Err(ScheduleError::ZeroTask { slot });
        }
        Ok(CyclicSchedule { slots })
    }

    /// Builds from the compact digit form, e.g. `"1213"`. Panics on bad
    /// input; meant for literals.
    pub fn from_digits(digits: &str) -> Self {
        let slots = digits
            .chars()
            .map(|c| c.to_digit(10).expect("digit") as usize)
            .collect();
        CyclicSchedule::new(slots).expect("valid digit schedule")
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Task performed on day `t` (any integer).
    pub fn task_on(&self, t: i64) -> usize {
        self.slots[t.rem_euclid(self.slots.len() as i64) as usize]
    }

    pub fn max_task(&self) -> usize {
        self.slots.iter().copied().max().unwrap_or(0)
    }

    /// Number of slots in one period given to `task`.
    pub fn occurrences(&self, task: usize) -> usize {
        self.slots.iter().filter(|&&s| s == task).count()
    }

    /// The same bi-infinite schedule written over `times` periods.
    pub fn repeated(&self, times: usize) -> CyclicSchedule {
        CyclicSchedule {
            slots: self.slots.repeat(times),
        }
    }

    /// Applies `map` to every slot (1-based to 1-based).
    pub fn relabeled(&self, mut map: impl FnMut(usize) -> usize) -> CyclicSchedule {
        CyclicSchedule {
            slots: self.slots.iter().map(|&s| map(s)).collect(),
        }
    }
}

impl TryFrom<Vec<usize>> for CyclicSchedule {
    type Error = ScheduleError;

    fn try_from(slots: Vec<usize>) -> Result<Self, Self::Error> {
        CyclicSchedule::new(slots)
    }
}

impl From<CyclicSchedule> for Vec<usize> {
    fn from(s: CyclicSchedule) -> Self {
        s.slots
    }
}

/// Compact digit form when every task index is a single digit, otherwise
/// comma-separated.
impl fmt::Display for CyclicSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.max_task() <= 9 {
            for s in &self.slots {
                write!(f, "{s}")?;
            }
        } else {
            for (i, s) in self.slots.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            // a lone wide index would otherwise read back as digits
            if self.slots.len() == 1 {
                f.write_str(",")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclicSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}|")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;

    fn inst(v: &[(i64, i64)]) -> Instance {
        Instance::new(v.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    #[test]
    fn density_fixtures() {
        assert_eq!(inst(&[(2, 1), (4, 1), (4, 1)]).density(), Rational::one());
        assert_eq!(inst(&[(2, 1), (3, 1), (6, 1)]).density(), Rational::one());
        assert_eq!(inst(&[(6, 5)]).density(), rat(5, 6));
    }

    #[test]
    fn rejects_short_periods() {
        assert!(matches!(
            Instance::new(vec![rat(2, 1), rat(1, 2)]),
            Err(InstanceError::PeriodBelowOne { task: 2, .. })
        ));
        assert_eq!(Instance::new(vec![]), Err(InstanceError::Empty));
    }

    #[test]
    fn canonical_is_stable() {
        let a = inst(&[(5, 1), (3, 2), (5, 1), (2, 1)]);
        let (c, perm) = a.canonical();
        assert_eq!(c.to_string(), "3/2,2,5,5");
        assert_eq!(perm, vec![2, 4, 1, 3]);
        for (j, &orig) in perm.iter().enumerate() {
            assert_eq!(c.period(j + 1), a.period(orig));
        }
    }

    #[test]
    fn schedule_display() {
        assert_eq!(CyclicSchedule::from_digits("1213").to_string(), "1213");
        let wide = CyclicSchedule::new(vec![1, 10, 2]).unwrap();
        assert_eq!(wide.to_string(), "1,10,2");
        assert_eq!(format!("{:?}", CyclicSchedule::from_digits("12")), "|12|");
    }

    #[test]
    fn schedule_rejects_zero() {
        assert_eq!(
            CyclicSchedule::new(vec![1, 0]),
            Err(ScheduleError::ZeroTask { slot: 1 })
        );
    }
}
