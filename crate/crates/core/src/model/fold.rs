use serde::Serialize;
use thiserror::Error;

use super::{Instance, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("folding {multiplicity} tasks of period {period} gives {folded}, below 1")]
    FoldedPeriodBelowOne {
        period: Rational,
        multiplicity: usize,
        folded: Rational,
    },
}

/// One merge of `m` equal-period tasks into a single task of period `v/m`.
///
/// Indices are 1-based. `members` refer to the instance before the step.
/// After the step the merged task sits where the first member was and the
/// other members are gone; `origin[j - 1]` names the pre-step task that
/// post-step task `j` came from (the first member, for the merged task).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldStep {
    pub members: Vec<usize>,
    pub replacement: usize,
    pub period: Rational,
    pub multiplicity: usize,
    pub folded_period: Rational,
    pub origin: Vec<usize>,
}

impl FoldStep {
    fn forward(&self, periods: &[Rational]) -> Vec<Rational> {
        self.origin
            .iter()
            .enumerate()
            .map(|(j, &pre)| {
                if j + 1 == self.replacement {
                    self.folded_period.clone()
                } else {
                    periods[pre - 1].clone()
                }
            })
            .collect()
    }

    fn backward(&self, periods: &[Rational]) -> Vec<Rational> {
        let pre_len = self.origin.len() + self.multiplicity - 1;
        let mut out = vec![Rational::zero(); pre_len];
        for (j, &pre) in self.origin.iter().enumerate() {
            if j + 1 != self.replacement {
                out[pre - 1] = periods[j].clone();
            }
        }
        for &m in &self.members {
            out[m - 1] = self.period.clone();
        }
        out
    }
}

/// Ordered record of the merges performed by [`normalize`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub steps: Vec<FoldStep>,
}

impl FoldPlan {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Replays the plan on `original`, producing the folded instance.
    pub fn fold(&self, original: &Instance) -> Instance {
        let periods = self
            .steps
            .iter()
            .fold(original.periods().to_vec(), |p, step| step.forward(&p));
        Instance::new(periods).expect("folding keeps periods at least 1")
    }

    /// Undoes the plan on `folded`, restoring the original task list.
    pub fn unfold(&self, folded: &Instance) -> Instance {
        let periods = self
            .steps
            .iter()
            .rev()
            .fold(folded.periods().to_vec(), |p, step| step.backward(&p));
        Instance::new(periods).expect("unfolding restores valid periods")
    }
}

/// Merges every group of equal periods `v` (size `m ≥ 2`) into one task of
/// period `v/m`, repeating until all periods are distinct. Density is
/// unchanged. Groups are taken in order of their first member.
pub fn normalize(instance: &Instance) -> Result<(Instance, FoldPlan), FoldError> {
    let mut periods = instance.periods().to_vec();
    let mut plan = FoldPlan::default();
    loop {
        let group = periods.iter().enumerate().find_map(|(i, v)| {
            let members: Vec<usize> = (i..periods.len())
                .filter(|&j| periods[j] == *v)
                .map(|j| j + 1)
                .collect();
            (members.len() >= 2).then_some(members)
        });
        let Some(members) = group else { break };

        let period = periods[members[0] - 1].clone();
        let multiplicity = members.len();
        let folded_period = &period / Rational::integer(multiplicity as i64);
        if folded_period < Rational::one() {
            return Err(FoldError::FoldedPeriodBelowOne {
                period,
                multiplicity,
                folded: folded_period,
            });
        }
        let origin: Vec<usize> = (1..=periods.len())
            .filter(|j| !members[1..].contains(j))
            .collect();
        let replacement = origin.iter().position(|&j| j == members[0]).unwrap() + 1;
        let step = FoldStep {
            members,
            replacement,
            period,
            multiplicity,
            folded_period,
            origin,
        };
        periods = step.forward(&periods);
        plan.steps.push(step);
    }
    let folded = Instance::new(periods).expect("folded periods are at least 1");
    Ok((folded, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;
    use proptest::prelude::*;

    fn inst(v: &[(i64, i64)]) -> Instance {
        Instance::new(v.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    #[test]
    fn folds_two_four_four_to_one() {
        let a = inst(&[(2, 1), (4, 1), (4, 1)]);
        let (f, plan) = normalize(&a).unwrap();
        assert_eq!(f.periods(), &[Rational::one()]);
        assert_eq!(plan.len(), 2);
        assert_eq!(plan.steps[0].members, vec![2, 3]);
        assert_eq!(plan.steps[0].folded_period, rat(2, 1));
        assert_eq!(plan.steps[1].members, vec![1, 2]);
        assert_eq!(f.density(), a.density());
        assert_eq!(plan.unfold(&f), a);
    }

    #[test]
    fn folds_fives() {
        let mut v = vec![(13, 1); 5];
        v.extend([(14, 1); 5]);
        v.extend([(78, 1); 5]);
        let a = inst(&v);
        let (f, plan) = normalize(&a).unwrap();
        assert_eq!(f.periods(), &[rat(13, 5), rat(14, 5), rat(78, 5)]);
        assert_eq!(plan.len(), 3);
        assert!(plan.steps.iter().all(|s| s.multiplicity == 5));
    }

    #[test]
    fn distinct_is_untouched() {
        let a = inst(&[(3, 2), (5, 1), (9, 1)]);
        let (f, plan) = normalize(&a).unwrap();
        assert_eq!(f, a);
        assert!(plan.is_empty());
    }

    #[test]
    fn below_one_is_reported() {
        let a = inst(&[(3, 2), (3, 2)]);
        assert!(matches!(
            normalize(&a),
            Err(FoldError::FoldedPeriodBelowOne {
                multiplicity: 2,
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn fold_preserves_density_and_unfolds(
            v in prop::collection::vec((1i64..6, 1i64..4), 1..9)
        ) {
            // periods drawn from a small pool so duplicates are common
            let periods: Vec<Rational> = v.iter().map(|&(p, q)| rat(p * 4 + q, q)).collect();
            let a = Instance::new(periods).unwrap();
            if let Ok((f, plan)) = normalize(&a) {
                prop_assert_eq!(f.density(), a.density());
                let d = f.distinct_values();
                prop_assert_eq!(d.len(), f.k());
                prop_assert!(f.distinct_values().len() <= a.distinct_values().len());
                prop_assert_eq!(plan.fold(&a), f.clone());
                prop_assert_eq!(plan.unfold(&f), a);
            }
        }
    }
}
