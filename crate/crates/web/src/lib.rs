//! wasm-bindgen entry points for `www/index.html`. Every export takes and
//! returns JSON text so the page needs no generated bindings beyond strings.

use pinwheel_core::checker::{verify, Verdict};
use pinwheel_core::constructions::{classify_case, five_sixths, schedule, three_period_schedule};
use pinwheel_core::model::{parse_instance, parse_schedule, Rational};
use pinwheel_core::regions::Region;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// J and M1..M7 as vertex lists, each vertex given exactly and as floats.
pub fn regions_value() -> Value {
    let regions = std::iter::once(Region::j()).chain(Region::all_m());
    let out: Vec<Value> = regions
        .map(|r| {
            let vertices: Vec<Value> = r
                .vertices()
                .iter()
                .map(|p| json!({ "x": p.x, "y": p.y, "fx": p.x.to_f64(), "fy": p.y.to_f64() }))
                .collect();
            json!({ "name": r.name, "vertices": vertices })
        })
        .collect();
    Value::Array(out)
}

/// Case, third period and template for the frequency point `(x, y)` of J.
pub fn classify_value(x: &str, y: &str) -> Result<Value, String> {
    let (x, y) = (single_frequency(x)?, single_frequency(y)?);
    let (a1, a2) = (x.recip(), y.recip());
    let case = classify_case(&a1, &a2).map_err(|e| e.to_string())?;
    let (_, s) = three_period_schedule(&a1, &a2).map_err(|e| e.to_string())?;
    let a3 = (five_sixths() - &x - &y).recip();
    Ok(json!({
        "case": case,
        "periods": [a1, a2, a3],
        "schedule": s.to_string(),
    }))
}

// frequencies may be 0 < x ≤ 1, which the instance grammar rejects
fn single_frequency(text: &str) -> Result<Rational, String> {
    let r: Rational = text.trim().parse().map_err(|e| format!("`{text}`: {e}"))?;
    if !r.is_positive() || r > Rational::one() {
        return Err(format!("frequency {r} is outside (0, 1]"));
    }
    Ok(r)
}

pub fn schedule_value(instance: &str) -> Result<Value, String> {
    let a = parse_instance(instance).map_err(|e| e.to_string())?;
    let (s, trace) = schedule(&a).map_err(|e| e.to_string())?;
    Ok(json!({
        "instance": a.to_string(),
        "density": a.density(),
        "schedule": s.to_string(),
        "length": s.len(),
        "cases": trace.cases(),
        "trace": trace.steps,
    }))
}

pub fn verify_value(schedule: &str, instance: &str) -> Result<Value, String> {
    let a = parse_instance(instance).map_err(|e| e.to_string())?;
    let s = parse_schedule(schedule).map_err(|e| e.to_string())?;
    match verify(&s, &a).map_err(|e| e.to_string())? {
        Verdict::Valid => Ok(json!({ "valid": true })),
        Verdict::Counterexample(c) => Ok(json!({ "valid": false, "counterexample": c })),
    }
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn regions() -> String {
    regions_value().to_string()
}

#[wasm_bindgen]
pub fn classify_point(x: &str, y: &str) -> Result<String, JsValue> {
    to_js(classify_value(x, y))
}

#[wasm_bindgen]
pub fn build_schedule(instance: &str) -> Result<String, JsValue> {
    to_js(schedule_value(instance))
}

#[wasm_bindgen]
pub fn check_schedule(schedule: &str, instance: &str) -> Result<String, JsValue> {
    to_js(verify_value(schedule, instance))
}
