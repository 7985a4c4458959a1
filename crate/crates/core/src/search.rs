//! Exhaustive search over schedules for small instances.
//!
//! A task of period `p/q` (lowest terms) is tracked by the ages of its last
//! `q` occurrences, most recent first. After each day every window ending
//! that day must hold: the `l`-th most recent occurrence must be at most
//! `⌈l·p/q⌉ - 1` days old. Since only `l ≤ q` matters (see
//! [`crate::checker`]), this finite state decides every window, and a valid
//! bi-infinite schedule exists exactly when the graph of live states
//! contains a cycle.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::checker;
use crate::model::{CyclicSchedule, Instance, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("more than {cap} states reachable; raise the cap")]
    StateCapExceeded { cap: usize },
    #[error("period {0} is too large for exhaustive search")]
    PeriodTooLarge(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Schedulable { certificate: CyclicSchedule },
    Unschedulable { states_explored: usize },
    Inconclusive { nodes_explored: usize },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&CyclicSchedule> {
        match self {
            SearchOutcome::Schedulable { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn is_unschedulable(&self) -> bool {
        matches!(self, SearchOutcome::Unschedulable { .. })
    }
}

/// Per-task window deadlines and the layout of the flat age vector.
#[derive(Debug, Clone)]
pub struct UrgencyModel {
    // offset[i]..offset[i + 1] are task i's ages
    offset: Vec<usize>,
    // deadline[offset[i] + l - 1] = ⌈l·a_i⌉ - 1
    deadline: Vec<u16>,
    cap: Vec<u16>,
}

/// Ages of the most recent occurrences of every task, flattened.
pub type UrgencyState = Vec<u16>;

impl UrgencyModel {
    pub fn new(instance: &Instance) -> Result<Self, SearchError> {
        let mut offset = vec![0];
        let mut deadline = Vec::new();
        let mut cap = Vec::new();
        for a in instance.periods() {
            let too_large = || SearchError::PeriodTooLarge(a.clone());
            let (p, q) = a.to_u64_parts().ok_or_else(too_large)?;
            if p >= u16::MAX as u64 / 2 {
                return Err(too_large());
            }
            for l in 1..=q {
                deadline.push(((l * p).div_ceil(q) - 1) as u16);
            }
            cap.push(p as u16);
            offset.push(deadline.len());
        }
        Ok(UrgencyModel {
            offset,
            deadline,
            cap,
        })
    }

    pub fn tasks(&self) -> usize {
        self.cap.len()
    }

    /// Every task treated as just performed `q` times: the loosest state,
    /// from which every genuinely reachable live state can be reached.
    pub fn initial(&self) -> UrgencyState {
        vec![0; self.deadline.len()]
    }

    /// State after performing 1-based `task`, or `None` if some window
    /// ending today is violated.
    pub fn step(&self, state: &[u16], task: usize) -> Option<UrgencyState> {
        let mut next = Vec::with_capacity(state.len());
        for i in 0..self.tasks() {
            let ages = &state[self.offset[i]..self.offset[i + 1]];
            let cap = self.cap[i];
            let start = next.len();
            if i + 1 == task {
                next.push(0);
                next.extend(ages[..ages.len() - 1].iter().map(|&a| (a + 1).min(cap)));
            } else {
                next.extend(ages.iter().map(|&a| (a + 1).min(cap)));
            }
            let dl = &self.deadline[self.offset[i]..self.offset[i + 1]];
            if next[start..].iter().zip(dl).any(|(a, d)| a > d) {
                return None;
            }
        }
        Some(next)
    }
}

const DEFAULT_NODE_BUDGET: usize = 20_000_000;

/// Depth-first search for a cyclic schedule of length `1..=max_period`,
/// trying tasks in ascending order; the first certificate found is the
/// lexicographically smallest of the shortest length. A candidate is
/// accepted only once the checker confirms its cyclic closure.
pub fn find_schedule(instance: &Instance, max_period: usize) -> Result<SearchOutcome, SearchError> {
    find_schedule_with_budget(instance, max_period, DEFAULT_NODE_BUDGET)
}

pub fn find_schedule_with_budget(
    instance: &Instance,
    max_period: usize,
    node_budget: usize,
) -> Result<SearchOutcome, SearchError> {
    let model = UrgencyModel::new(instance)?;
    let mut dfs = Dfs {
        model: &model,
        instance,
        prefix: Vec::new(),
        nodes: 0,
        budget: node_budget,
        dead: HashSet::new(),
    };
    for n in 1..=max_period {
        // the schedule must contain every task at least once
        if n < instance.k() {
            continue;
        }
        dfs.dead.clear();
        match dfs.run(&model.initial(), n) {
            Probe::Found(slots) => {
                let certificate = CyclicSchedule::new(slots).expect("nonempty");
                debug_assert!(checker::is_valid(&certificate, instance));
                return Ok(SearchOutcome::Schedulable { certificate });
            }
            Probe::OutOfBudget => break,
            Probe::Exhausted { .. } => {}
        }
    }
    Ok(SearchOutcome::Inconclusive {
        nodes_explored: dfs.nodes,
    })
}

enum Probe {
    Found(Vec<usize>),
    /// No certificate below this node; `leaf` records whether any prefix
    /// reached full length (and was then rejected by the closure check).
    Exhausted {
        leaf: bool,
    },
    OutOfBudget,
}

struct Dfs<'a> {
    model: &'a UrgencyModel,
    instance: &'a Instance,
    prefix: Vec<usize>,
    nodes: usize,
    budget: usize,
    // (state, remaining) pairs from which no live path of that length exists
    dead: HashSet<(UrgencyState, usize)>,
}

impl Dfs<'_> {
    fn run(&mut self, state: &UrgencyState, remaining: usize) -> Probe {
        if remaining == 0 {
            let s = CyclicSchedule::new(self.prefix.clone()).expect("nonempty");
            return if checker::is_valid(&s, self.instance) {
                Probe::Found(self.prefix.clone())
            } else {
                Probe::Exhausted { leaf: true }
            };
        }
        if self.dead.contains(&(state.clone(), remaining)) {
            return Probe::Exhausted { leaf: false };
        }
        let mut any_leaf = false;
        for task in 1..=self.model.tasks() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Probe::OutOfBudget;
            }
            let Some(next) = self.model.step(state, task) else {
                continue;
            };
            self.prefix.push(task);
            let probe = self.run(&next, remaining - 1);
            self.prefix.pop();
            match probe {
                Probe::Exhausted { leaf } => any_leaf |= leaf,
                other => return other,
            }
        }
        if !any_leaf {
            self.dead.insert((state.clone(), remaining));
        }
        Probe::Exhausted { leaf: any_leaf }
    }
}

/// Decides schedulability by a greatest fixpoint: build every live state
/// reachable from the loosest state, then repeatedly discard states with
/// no live successor. Whatever survives lies on or leads to a cycle; an
/// empty survivor set proves the instance unschedulable.
pub fn prove_unschedulable(
    instance: &Instance,
    state_cap: usize,
) -> Result<SearchOutcome, SearchError> {
    let model = UrgencyModel::new(instance)?;
    let k = model.tasks();

    let mut ids: HashMap<UrgencyState, usize> = HashMap::new();
    let mut states: Vec<UrgencyState> = Vec::new();
    // succ[s][task - 1] = successor id
    let mut succ: Vec<Vec<Option<usize>>> = Vec::new();
    let start = model.initial();
    ids.insert(start.clone(), 0);
    states.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut row = Vec::with_capacity(k);
        for task in 1..=k {
            let next = model.step(&states[s], task).map(|st| {
                *ids.entry(st).or_insert_with_key(|st| {
                    states.push(st.clone());
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                })
            });
            row.push(next);
        }
        succ.push(row);
        if states.len() > state_cap {
            return Err(SearchError::StateCapExceeded { cap: state_cap });
        }
    }

    let count = states.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut out_degree = vec![0usize; count];
    for (s, row) in succ.iter().enumerate() {
        for t in row.iter().flatten() {
            preds[*t].push(s);
            out_degree[s] += 1;
        }
    }
    let mut alive = vec![true; count];
    let mut doomed: Vec<usize> = (0..count).filter(|&s| out_degree[s] == 0).collect();
    while let Some(s) = doomed.pop() {
        if !alive[s] {
            continue;
        }
        alive[s] = false;
        for &p in &preds[s] {
            out_degree[p] -= 1;
            if out_degree[p] == 0 && alive[p] {
                doomed.push(p);
            }
        }
    }

    let Some(mut cur) = (0..count).find(|&s| alive[s]) else {
        return Ok(SearchOutcome::Unschedulable {
            states_explored: count,
        });
    };
    // follow the smallest surviving action until a state repeats
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut actions = Vec::new();
    while !seen.contains_key(&cur) {
        seen.insert(cur, actions.len());
        let (task, next) = succ[cur]
            .iter()
            .enumerate()
            .find_map(|(t, n)| n.filter(|&n| alive[n]).map(|n| (t + 1, n)))
            .expect("surviving states keep a surviving successor");
        actions.push(task);
        cur = next;
    }
    let certificate =
        CyclicSchedule::new(actions[seen[&cur]..].to_vec()).expect("cycle is nonempty");
    assert!(
        checker::is_valid(&certificate, instance),
        "cycle {certificate:?} failed verification"
    );
    Ok(SearchOutcome::Schedulable { certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_instance;
    use proptest::prelude::*;

    fn inst(t: &str) -> Instance {
        parse_instance(t).unwrap()
    }

    #[test]
    fn step_tracks_windows() {
        let model = UrgencyModel::new(&inst("7/2")).unwrap();
        // deadlines 3 and 6
        let mut s = model.initial();
        for _ in 0..3 {
            s = model.step(&s, 2).unwrap_or_else(|| panic!("alive"));
        }
        assert!(model.step(&s, 2).is_none());
        assert!(model.step(&s, 1).is_some());
    }

    #[test]
    fn find_small_certificates() {
        let out = find_schedule(&inst("2,4,4"), 8).unwrap();
        assert_eq!(out.certificate().unwrap().to_string(), "1213");
        let a = inst("12/5,12/5,6");
        let out = find_schedule(&a, 12).unwrap();
        let cert = out.certificate().expect("schedulable");
        assert_eq!(cert.len(), 12);
        assert!(checker::is_valid(cert, &a));
    }

    #[test]
    fn find_gives_up_quietly() {
        let out = find_schedule(&inst("3/2,5,9"), 45).unwrap();
        assert!(matches!(out, SearchOutcome::Inconclusive { .. }));
        let out = find_schedule_with_budget(&inst("2,4,4"), 8, 3).unwrap();
        assert!(matches!(out, SearchOutcome::Inconclusive { .. }));
    }

    #[test]
    fn prove_fixtures() {
        assert!(prove_unschedulable(&inst("2,3,6"), 1_000_000)
            .unwrap()
            .is_unschedulable());
        assert!(prove_unschedulable(&inst("3/2,5,9"), 1_000_000)
            .unwrap()
            .is_unschedulable());
        let a = inst("2,4,4");
        let out = prove_unschedulable(&a, 1_000_000).unwrap();
        assert!(checker::is_valid(out.certificate().unwrap(), &a));
    }

    #[test]
    fn state_cap_is_enforced() {
        assert_eq!(
            prove_unschedulable(&inst("11/7,4,11"), 10),
            Err(SearchError::StateCapExceeded { cap: 10 })
        );
    }

    fn small_instance() -> impl Strategy<Value = Instance> {
        prop::collection::vec((1i64..=3, 1i64..=18), 1..=3).prop_map(|v| {
            let periods = v
                .iter()
                .map(|&(q, p)| Rational::new(p.max(q).min(6 * q), q))
                .collect();
            Instance::new(periods).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn find_and_prove_agree(a in small_instance()) {
            let proof = prove_unschedulable(&a, 2_000_000).unwrap();
            match &proof {
                SearchOutcome::Schedulable { certificate } => {
                    prop_assert!(checker::is_valid(certificate, &a));
                    let found = find_schedule(&a, certificate.len()).unwrap();
                    let cert = found.certificate().expect("find must succeed");
                    prop_assert!(checker::is_valid(cert, &a));
                    prop_assert!(cert.len() <= certificate.len());
                }
                SearchOutcome::Unschedulable { .. } => {
                    let found = find_schedule_with_budget(&a, 24, 200_000).unwrap();
                    prop_assert!(found.certificate().is_none());
                }
                SearchOutcome::Inconclusive { .. } => unreachable!(),
            }
            if a.density() > Rational::one() {
                prop_assert!(proof.is_unschedulable());
            }
        }
    }
}
