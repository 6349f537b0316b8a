//! JSON model files.
//!
//! A model file is one JSON object. Complex scalars are `[re, im]` pairs and
//! matrices are nested row-major arrays of them. The `mode` key selects how
//! the conditional propagators are obtained:
//!
//! ```json
//! { "mode": "hamiltonian", "n": 2, "m": 2,
//!   "c": [[0.7071, 0], [0.7071, 0]],
//!   "h_env": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
//!   "v": [ <m×m>, <m×m> ],
//!   "r0": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]],
//!   "epsilon": [0.0, 1.0] }
//! ```
//!
//! `"mode": "propagator"` replaces `h_env`/`v` with `t` (the instant) and `w`
//! (one unitary per system level). A missing `mode` means `hamiltonian`;
//! `epsilon` is optional in both modes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{validate, DephasingModel, Dynamics, ValidatedModel};
use crate::error::{Error, Result, ValidationErrors};
use crate::linalg::{Complex64, ComplexMatrix};

pub type RawComplex = [f64; 2];
pub type RawMatrix = Vec<Vec<RawComplex>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Hamiltonian,
    Propagator,
}

/// On-disk layout of a model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub n: usize,
    pub m: usize,
    pub c: Vec<RawComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_env: Option<RawMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<RawMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<RawMatrix>>,
    pub r0: RawMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
}

fn to_complex(z: &RawComplex) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn from_complex(z: &Complex64) -> RawComplex {
    [z.re, z.im]
}

fn to_matrix(raw: &RawMatrix, path: &str, errs: &mut ValidationErrors) -> Option<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = raw
        .iter()
        .map(|r| r.iter().map(to_complex).collect())
        .collect();
    match ComplexMatrix::from_rows(&rows) {
        Ok(m) => Some(m),
        Err(e) => {
            errs.push(path, e.to_string());
            None
        }
    }
}

fn from_matrix(m: &ComplexMatrix) -> RawMatrix {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(from_complex).collect())
        .collect()
}

fn to_matrices(raw: &[RawMatrix], key: &str, errs: &mut ValidationErrors) -> Vec<ComplexMatrix> {
    raw.iter()
        .enumerate()
        .filter_map(|(k, m)| to_matrix(m, &format!("{key}[{k}]"), errs))
        .collect()
}

impl ModelFile {
    pub fn into_model(self) -> Result<DephasingModel> {
        let mut errs = ValidationErrors::default();
        let amplitudes = self.c.iter().map(to_complex).collect();
        let initial_env = to_matrix(&self.r0, "r0", &mut errs);

        let mode = self.mode.unwrap_or(Mode::Hamiltonian);
        let dynamics = match mode {
            Mode::Hamiltonian => {
                for key in ["t", "w"] {
                    let present = if key == "t" {
                        self.t.is_some()
                    } else {
                        self.w.is_some()
                    };
                    if present {
                        errs.push(key, "not allowed in hamiltonian mode");
                    }
                }
                let h = match &self.h_env {
                    Some(raw) => to_matrix(raw, "h_env", &mut errs),
                    None => {
                        errs.push("h_env", "required in hamiltonian mode");
                        None
                    }
                };
                let v = match &self.v {
                    Some(raw) => to_matrices(raw, "v", &mut errs),
                    None => {
                        errs.push("v", "required in hamiltonian mode");
                        Vec::new()
                    }
                };
                h.map(|env_hamiltonian| Dynamics::Hamiltonian {
                    env_hamiltonian,
                    couplings: v,
                })
            }
            Mode::Propagator => {
                for key in ["h_env", "v"] {
                    let present = if key == "h_env" {
                        self.h_env.is_some()
                    } else {
                        self.v.is_some()
                    };
                    if present {
                        errs.push(key, "not allowed in propagator mode");
                    }
                }
                if self.t.is_none() {
                    errs.push("t", "required in propagator mode");
                }
                let w = match &self.w {
                    Some(raw) => to_matrices(raw, "w", &mut errs),
                    None => {
                        errs.push("w", "required in propagator mode");
                        Vec::new()
                    }
                };
                self.t.map(|instant| Dynamics::Propagators {
                    instant,
                    propagators: w,
                })
            }
        };

        match (initial_env, dynamics) {
            (Some(initial_env), Some(dynamics)) if errs.is_empty() => Ok(DephasingModel {
                n: self.n,
                m: self.m,
                amplitudes,
                initial_env,
                dynamics,
                system_energies: self.epsilon,
            }),
            _ => Err(Error::Validation(errs)),
        }
    }

    pub fn from_model(model: &DephasingModel) -> Self {
        let mut file = ModelFile {
            mode: Some(Mode::Hamiltonian),
            n: model.n,
            m: model.m,
            c: model.amplitudes.iter().map(from_complex).collect(),
            h_env: None,
            v: None,
            t: None,
            w: None,
            r0: from_matrix(&model.initial_env),
            epsilon: model.system_energies.clone(),
        };
        match &model.dynamics {
            Dynamics::Hamiltonian {
                env_hamiltonian,
                couplings,
            } => {
                file.h_env = Some(from_matrix(env_hamiltonian));
                file.v = Some(couplings.iter().map(from_matrix).collect());
            }
            Dynamics::Propagators {
                instant,
                propagators,
            } => {
                file.mode = Some(Mode::Propagator);
                file.t = Some(*instant);
                file.w = Some(propagators.iter().map(from_matrix).collect());
            }
        }
        file
    }
}

/// Parses a model document. Syntax and type errors carry the JSON path of the
/// offending value; shape problems come back as [`Error::Validation`].
pub fn parse_model(json: &str) -> Result<DephasingModel> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let file: ModelFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("{path}: {}", e.into_inner()))
    })?;
    file.into_model()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ValidatedModel> {
    let text = fs::read_to_string(path)?;
    validate(parse_model(&text)?)
}

/// Pretty JSON with each vector or matrix row on one line.
pub fn model_to_json(model: &DephasingModel) -> String {
    let value = serde_json::to_value(ModelFile::from_model(model)).expect("model file serializes");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out
}

fn is_row(items: &[Value]) -> bool {
    items.iter().all(|v| match v {
        Value::Array(inner) => inner.iter().all(Value::is_number),
        other => other.is_number(),
    })
}

fn write_value(value: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth + 1);
    match value {
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, v)) in map.iter().enumerate() {
                out.push_str(&format!("{pad}{}: ", Value::String(key.clone())));
                write_value(v, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() && !is_row(items) => {
            out.push_str("[\n");
            for (k, v) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(v, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

pub fn save_model(path: impl AsRef<Path>, model: &DephasingModel) -> Result<()> {
    let mut text = model_to_json(model);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
