//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use dephase::criteria::{decide_with, Verdict, DEFAULT_TOL_COMM};
use dephase::evolution::{joint_state, propagators};
use dephase::fixtures;
use dephase::linalg::{partial_transpose, ComplexMatrix, Subsystem};
use dephase::model::{random_instance, validate, EnsembleSpec, Family, ValidatedModel};
use dephase::witnesses::{negativity, pt_spectrum, witness_scan};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_DIM: usize = 6;
const MAX_STEPS: usize = 2000;

fn rows(m: &ComplexMatrix) -> Value {
    json!(m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn instance(family: &str, n: usize, m: usize, seed: u64) -> Result<ValidatedModel, String> {
    let family: Family =
        serde_json::from_value(json!(family)).map_err(|_| format!("unknown family {family:?}"))?;
    if n > MAX_DIM || m > MAX_DIM {
        return Err(format!("dimensions are limited to {MAX_DIM} in the demo"));
    }
    let spec = EnsembleSpec {
        seed,
        count: 1,
        n,
        m,
        family,
    };
    validate(random_instance(&spec, 0).map_err(err)?).map_err(err)
}

fn evaluate(model: &ValidatedModel, t: f64) -> Result<Value, String> {
    let props = propagators(model, t).map_err(err)?;
    let report = decide_with(model, &props, DEFAULT_TOL_COMM).map_err(err)?;
    let state = joint_state(model, &props).map_err(err)?;
    let spectrum = pt_spectrum(&state, Subsystem::System).map_err(err)?;
    let witnesses = witness_scan(model, &props, &report).map_err(err)?;
    Ok(json!({
        "report": report,
        "pt_spectrum": spectrum,
        "negativity": negativity(&spectrum),
        "minor_witnesses": witnesses,
        "sigma": rows(&state.sigma),
    }))
}

/// The built-in qutrit with a maximally mixed qubit environment.
pub fn qutrit_example_json() -> Result<String, String> {
    let model = validate(fixtures::qutrit_mixed_environment()).map_err(err)?;
    let mut value = evaluate(&model, fixtures::QUTRIT_EXAMPLE_INSTANT)?;
    let state = joint_state(
        &model,
        &propagators(&model, fixtures::QUTRIT_EXAMPLE_INSTANT).map_err(err)?,
    )
    .map_err(err)?;
    let pt = partial_transpose(&state.sigma, 3, 2, Subsystem::Environment).map_err(err)?;
    value["sigma_pt_environment"] = rows(&pt);
    Ok(value.to_string())
}

/// Verdict, commutator norms and PT spectrum over `steps` points in `[0, t_end]`.
pub fn time_sweep_json(
    family: &str,
    n: usize,
    m: usize,
    seed: u64,
    t_end: f64,
    steps: usize,
) -> Result<String, String> {
    if !(2..=MAX_STEPS).contains(&steps) || t_end.is_nan() || t_end <= 0.0 {
        return Err(format!("need 2 <= steps <= {MAX_STEPS} and t_end > 0"));
    }
    let model = instance(family, n, m, seed)?;
    let mut out = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = t_end * i as f64 / (steps - 1) as f64;
        let props = propagators(&model, t).map_err(err)?;
        let report = decide_with(&model, &props, DEFAULT_TOL_COMM).map_err(err)?;
        let spectrum = pt_spectrum(
            &joint_state(&model, &props).map_err(err)?,
            Subsystem::System,
        )
        .map_err(err)?;
        out.push(json!({
            "t": t,
            "max_qubit_like_norm": report.max_qubit_like_norm(),
            "max_cross_norm": report.max_cross_norm(),
            "min_pt_eig": spectrum[0],
            "negativity": negativity(&spectrum),
            "entangled": report.verdict == Verdict::Entangled,
        }));
    }
    Ok(Value::Array(out).to_string())
}

/// Full report for one seeded instance at time `t`.
pub fn check_instance_json(
    family: &str,
    n: usize,
    m: usize,
    seed: u64,
    t: f64,
) -> Result<String, String> {
    let model = instance(family, n, m, seed)?;
    Ok(evaluate(&model, t)?.to_string())
}

#[wasm_bindgen]
pub fn qutrit_example() -> Result<String, JsError> {
    qutrit_example_json().map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn time_sweep(
    family: &str,
    n: usize,
    m: usize,
    seed: u64,
    t_end: f64,
    steps: usize,
) -> Result<String, JsError> {
    time_sweep_json(family, n, m, seed, t_end, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check_instance(
    family: &str,
    n: usize,
    m: usize,
    seed: u64,
    t: f64,
) -> Result<String, JsError> {
    check_instance_json(family, n, m, seed, t).map_err(|e| JsError::new(&e))
}
