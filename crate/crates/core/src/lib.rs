//! Pinwheel scheduling with rational periods.
//!
//! Each task `i` has a period `a_i ≥ 1` and must be performed at least `l`
//! times in every `⌈l·a_i⌉` consecutive days, for every `l ≥ 1`. This crate
//! checks cyclic schedules against that condition exactly, constructs
//! schedules for instances with at most three distinct periods and density
//! at most 5/6, verifies the frequency-plane cover behind the three-period
//! case split, and searches small instances exhaustively.

// errors carry the offending rationals by value
#![allow(clippy::result_large_err)]

pub mod checker;
pub mod constructions;
pub mod model;
pub mod regions;
pub mod search;

pub use checker::{verify, window_min_count, Counterexample, Verdict};
pub use constructions::{schedule, CaseId, CaseTrace};
pub use model::{rat, CyclicSchedule, Instance, Rational};
pub use regions::{cover_check, fm_feasible, CoverResult, Point, Region};
pub use search::{find_schedule, prove_unschedulable, SearchOutcome};
