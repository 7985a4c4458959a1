//! Exact rationals, instances, cyclic schedules and their text forms.

mod fold;
mod instance;
mod rational;
pub mod text;

pub use fold::{normalize, FoldError, FoldPlan, FoldStep};
pub use instance::{CyclicSchedule, Instance, InstanceError, ScheduleError};
pub use rational::{rat, Rational};
pub use text::{emit_instance, emit_schedule, parse_instance, parse_schedule, ParseError};

/// `⌈l·a⌉` for a period `a`.
pub fn ceil_mul(l: u64, a: &Rational) -> num_bigint::BigInt {
    a.ceil_mul(l)
}

/// Sum of reciprocals of the instance's periods.
pub fn density(instance: &Instance) -> Rational {
    instance.density()
}
