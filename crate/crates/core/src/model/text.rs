//! Text forms of instances and schedules.
//!
//! Instances are comma-separated periods, each either `p/q`, an integer, or
//! a decimal with at most nine fractional digits (`1.2` is exactly `6/5`).
//! Schedules are comma-separated 1-based task indices; without commas the
//! text is read as one digit per slot (`112112113`). Whitespace is ignored
//! throughout.

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use thiserror::Error;

use super::{CyclicSchedule, Instance, Rational};

const MAX_FRACTION_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {reason}")]
pub struct ParseError {
    /// Byte offset into the input where the offending token starts.
    pub position: usize,
    pub reason: String,
}

impl ParseError {
    fn at(position: usize, reason: impl Into<String>) -> Self {
        ParseError {
            position,
            reason: reason.into(),
        }
    }
}

/// Splits on commas, yielding each trimmed token and the byte offset of
/// its first non-blank character.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    text.split(',').map(move |raw| {
        let start = offset + (raw.len() - raw.trim_start().len());
        offset += raw.len() + 1;
        (start, raw.trim())
    })
}

fn parse_unsigned(digits: &str, pos: usize, what: &str) -> Result<BigInt, ParseError> {
    let digits: String = digits.chars().filter(|c| !c.is_whitespace()).collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(ParseError::at(
            pos,
            format!("expected digits for {what}, got `{digits}`"),
        ));
    }
    Ok(digits.parse().expect("ascii digits"))
}

/// Parses a single period token.
pub fn parse_rational(token: &str, pos: usize) -> Result<Rational, ParseError> {
    if token.is_empty() {
        return Err(ParseError::at(pos, "empty period"));
    }
    if let Some((num, den)) = token.split_once('/') {
        let num = parse_unsigned(num, pos, "numerator")?;
        let den = parse_unsigned(den, pos, "denominator")?;
        if den.is_zero() {
            return Err(ParseError::at(pos, "zero denominator"));
        }
        return Ok(Rational::from_bigints(num, den));
    }
    if let Some((int, frac)) = token.split_once('.') {
        let int = if int.trim().is_empty() {
            BigInt::zero()
        } else {
            parse_unsigned(int, pos, "integer part")?
        };
        let frac = frac.trim();
        if frac.len() > MAX_FRACTION_DIGITS {
            return Err(ParseError::at(
                pos,
                format!("at most {MAX_FRACTION_DIGITS} fractional digits are allowed"),
            ));
        }
        if frac.is_empty() {
            return Ok(Rational::from(int));
        }
        let frac_value = parse_unsigned(frac, pos, "fraction")?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Rational::from_bigints(int * &scale + frac_value, scale));
    }
    Ok(Rational::from(parse_unsigned(token, pos, "period")?))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut periods = Vec::new();
    for (pos, tok) in tokens(text) {
        let p = parse_rational(tok, pos)?;
        if p < Rational::one() {
            return Err(ParseError::at(pos, format!("period {p} is below 1")));
        }
        periods.push(p);
    }
    Instance::new(periods).map_err(|e| ParseError::at(0, e.to_string()))
}

pub fn parse_schedule(text: &str) -> Result<CyclicSchedule, ParseError> {
    let mut slots = Vec::new();
    if text.contains(',') {
        let body = text.trim_end().strip_suffix(',').unwrap_or(text);
        for (pos, tok) in tokens(body) {
            let v = parse_unsigned(tok, pos, "task index")?;
            let v: usize = v
                .try_into()
                .map_err(|_| ParseError::at(pos, "task index too large"))?;
            if v == 0 {
                return Err(ParseError::at(pos, "task indices start at 1"));
            }
            slots.push(v);
        }
    } else {
        for (pos, c) in text.char_indices() {
            if c.is_whitespace() {
                continue;
            }
            match c.to_digit(10) {
                Some(0) => return Err(ParseError::at(pos, "task indices start at 1")),
                Some(d) => slots.push(d as usize),
                None => return Err(ParseError::at(pos, format!("unexpected character `{c}`"))),
            }
        }
    }
    CyclicSchedule::new(slots).map_err(|e| ParseError::at(0, e.to_string()))
}

pub fn emit_instance(instance: &Instance) -> String {
    instance.to_string()
}

pub fn emit_schedule(schedule: &CyclicSchedule) -> String {
    schedule.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;
    use proptest::prelude::*;

    #[test]
    fn instance_grammar() {
        let a = parse_instance("2,7/2").unwrap();
        assert_eq!(a.periods(), &[rat(2, 1), rat(7, 2)]);
        let b = parse_instance(" 1.2 , 6 ").unwrap();
        assert_eq!(b.periods(), &[rat(6, 5), rat(6, 1)]);
        assert_eq!(
            parse_instance("1.000000001").unwrap().periods()[0],
            rat(1_000_000_001, 1_000_000_000)
        );
    }

    #[test]
    fn instance_errors() {
        let e = parse_instance("2,0/3").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(e.reason.contains("below 1"), "{e}");
        assert!(parse_instance("2,1/0").is_err());
        assert!(parse_instance("2,,3").is_err());
        assert!(parse_instance("1.0000000001").is_err());
        assert!(parse_instance("-2").is_err());
        assert!(parse_instance("sqrt2").is_err());
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn schedule_grammar() {
        assert_eq!(
            parse_schedule("112112113").unwrap().slots(),
            &[1, 1, 2, 1, 1, 2, 1, 1, 3]
        );
        assert_eq!(parse_schedule("1, 10, 2").unwrap().slots(), &[1, 10, 2]);
        assert_eq!(parse_schedule("12 13").unwrap().slots(), &[1, 2, 1, 3]);
        let e = parse_schedule("1203").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse_schedule("1x").is_err());
        assert!(parse_schedule("").is_err());
    }

    proptest! {
        #[test]
        fn instance_text_round_trips(v in prop::collection::vec((1i64..500, 1i64..40), 1..8)) {
            let periods: Vec<Rational> = v.iter().map(|&(p, q)| rat(p.max(q), q)).collect();
            let a = Instance::new(periods).unwrap();
            let text = emit_instance(&a);
            prop_assert_eq!(parse_instance(&text).unwrap(), a.clone());
            prop_assert_eq!(emit_instance(&parse_instance(&text).unwrap()), text);
        }

        #[test]
        fn schedule_text_round_trips(v in prop::collection::vec(1usize..14, 1..30)) {
            let s = CyclicSchedule::new(v).unwrap();
            let text = emit_schedule(&s);
            prop_assert_eq!(parse_schedule(&text).unwrap(), s);
        }
    }
}
