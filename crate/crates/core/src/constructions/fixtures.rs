use serde::Serialize;

use crate::model::{rat, CyclicSchedule, Instance, Rational};

/// Which construction produced a schedule. `Two*` cover two distinct
/// periods, `I`..`VII` three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseId {
    TwoI,
    TwoII,
    TwoIII,
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl CaseId {
    pub const THREE: [CaseId; 7] = [
        CaseId::I,
        CaseId::II,
        CaseId::III,
        CaseId::IV,
        CaseId::V,
        CaseId::VI,
        CaseId::VII,
    ];

    /// 1..=7 for the three-period cases.
    pub fn region_index(self) -> Option<usize> {
        CaseId::THREE.iter().position(|&c| c == self).map(|i| i + 1)
    }

    pub fn from_region_index(i: usize) -> Option<CaseId> {
        CaseId::THREE.get(i.checked_sub(1)?).copied()
    }
}

/// Lower bound on one anchor period; `strict` marks bounds that must be
/// exceeded (the anchor is only valid with `v + ε`, `ε > 0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnchorPeriod {
    pub value: Rational,
    pub strict: bool,
}

/// A minimal instance together with a schedule valid for it and, by
/// monotonicity, for every instance dominating it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fixture {
    pub case: CaseId,
    pub anchor: Vec<AnchorPeriod>,
    pub template: CyclicSchedule,
}

impl Fixture {
    fn new(case: CaseId, anchor: &[(Rational, bool)], template: &str) -> Self {
        Fixture {
            case,
            anchor: anchor
                .iter()
                .map(|(value, strict)| AnchorPeriod {
                    value: value.clone(),
                    strict: *strict,
                })
                .collect(),
            template: CyclicSchedule::from_digits(template),
        }
    }

    pub fn has_strict_bound(&self) -> bool {
        self.anchor.iter().any(|a| a.strict)
    }

    /// The anchor with `eps` added to every strict bound.
    pub fn anchor_instance(&self, eps: &Rational) -> Instance {
        let periods = self
            .anchor
            .iter()
            .map(|a| {
                if a.strict {
                    &a.value + eps
                } else {
                    a.value.clone()
                }
            })
            .collect();
        Instance::new(periods).expect("anchor periods are at least 1")
    }

    /// Whether `periods` (same length, same task order) meets every bound.
    pub fn is_dominated_by(&self, periods: &[Rational]) -> bool {
        periods.len() == self.anchor.len()
            && self.anchor.iter().zip(periods).all(|(a, p)| {
                if a.strict {
                    *p > a.value
                } else {
                    *p >= a.value
                }
            })
    }
}

/// All fixed-template constructions, ordered by case.
pub fn fixture_table() -> Vec<Fixture> {
    use CaseId::*;
    let r = |p, q| rat(p, q);
    vec![
        Fixture::new(TwoI, &[(r(6, 5), false), (r(6, 1), false)], "111112"),
        Fixture::new(TwoII, &[(r(3, 2), false), (r(3, 1), false)], "112"),
        Fixture::new(TwoIII, &[(r(2, 1), false), (r(2, 1), false)], "12"),
        Fixture::new(
            II,
            &[(r(3, 2), false), (r(5, 1), true), (r(9, 1), false)],
            "112112113",
        ),
        Fixture::new(
            III,
            &[(r(11, 7), false), (r(4, 1), true), (r(11, 1), false)],
            "11211211213",
        ),
        Fixture::new(
            IV,
            &[(r(12, 7), false), (r(3, 1), true), (r(12, 1), false)],
            "121121211213",
        ),
        Fixture::new(
            V,
            &[(r(2, 1), true), (r(3, 1), false), (r(6, 1), false)],
            "121123",
        ),
        Fixture::new(
            VI,
            &[(r(2, 1), true), (r(12, 5), false), (r(12, 1), false)],
            "121211212123",
        ),
        Fixture::new(
            VII,
            &[(r(12, 5), false), (r(12, 5), false), (r(6, 1), false)],
            "121213212123",
        ),
    ]
}

pub fn fixture(case: CaseId) -> Option<Fixture> {
    fixture_table().into_iter().find(|f| f.case == case)
}

/// First two-period fixture whose anchor the sorted pair dominates.
pub fn two_period_anchor_for(periods: &[Rational]) -> Option<Fixture> {
    fixture_table()
        .into_iter()
        .filter(|f| f.anchor.len() == 2)
        .find(|f| f.is_dominated_by(periods))
}
