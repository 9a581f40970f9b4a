//! JSON forms of matrices and states.
//!
//! Matrix: `{"rows": r, "cols": c, "data": [[[re, im], …], …]}`.
//! State: `{"kind": "vector", "dim": d, "data": [[re, im], …]}` or
//! `{"kind": "density", "dim": d, "data": <matrix rows>}`.
//! Floats are written in shortest round-trip form, so reading back what was
//! written reproduces every bit.

use serde_json::{json, Value};

use crate::operator::{Complex64, ComplexMatrix, State};

/// A problem at a JSON path relative to the value being decoded.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeError {
    pub path: String,
    pub message: String,
}

impl DecodeError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Prefixes the path with `parent`.
    pub fn under(mut self, parent: &str) -> Self {
        self.path = match (parent.is_empty(), self.path.is_empty(), self.path.starts_with('[')) {
            (true, _, _) => self.path,
            (false, true, _) => parent.to_string(),
            (false, false, true) => format!("{parent}{}", self.path),
            (false, false, false) => format!("{parent}.{}", self.path),
        };
        self
    }
}

fn complex_to_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_from_value(v: &Value, path: &str) -> Result<Complex64, DecodeError> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| DecodeError::new(path, "expected a [re, im] pair"))?;
    let part = |x: &Value| {
        x.as_f64()
            .filter(|f| f.is_finite())
            .ok_or_else(|| DecodeError::new(path, format!("expected a finite number, got {x}")))
    };
    Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
}

fn rows_to_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|&z| complex_to_value(z)).collect()))
            .collect(),
    )
}

fn rows_from_value(v: &Value, rows: usize, cols: usize) -> Result<ComplexMatrix, DecodeError> {
    let arr = v.as_array().ok_or_else(|| DecodeError::new("data", "expected an array of rows"))?;
    if arr.len() != rows {
        return Err(DecodeError::new("data", format!("expected {rows} rows, found {}", arr.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in arr.iter().enumerate() {
        let path = format!("data[{i}]");
        let entries = row
            .as_array()
            .ok_or_else(|| DecodeError::new(path.as_str(), "expected a row array"))?;
        if entries.len() != cols {
            return Err(DecodeError::new(
                path.as_str(),
                format!("row {i} has {} entries, expected {cols}", entries.len()),
            ));
        }
        for (j, z) in entries.iter().enumerate() {
            data.push(complex_from_value(z, &format!("data[{i}][{j}]"))?);
        }
    }
    ComplexMatrix::from_vec(rows, cols, data).map_err(|e| DecodeError::new("data", e.to_string()))
}

fn usize_field(v: &Value, key: &str) -> Result<usize, DecodeError> {
    v.get(key)
        .ok_or_else(|| DecodeError::new("", format!("missing field {key:?}")))?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| DecodeError::new(key, format!("{key} must be a nonnegative integer")))
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    json!({"rows": m.rows(), "cols": m.cols(), "data": rows_to_value(m)})
}

pub fn matrix_from_value(v: &Value) -> Result<ComplexMatrix, DecodeError> {
    if !v.is_object() {
        return Err(DecodeError::new("", "expected a matrix object"));
    }
    let rows = usize_field(v, "rows")?;
    let cols = usize_field(v, "cols")?;
    let data = v.get("data").ok_or_else(|| DecodeError::new("", "missing field \"data\""))?;
    rows_from_value(data, rows, cols)
}

pub fn state_to_value(s: &State) -> Value {
    match s {
        State::Vector(xi) => json!({
            "kind": "vector",
            "dim": xi.len(),
            "data": xi.iter().map(|&z| complex_to_value(z)).collect::<Vec<_>>(),
        }),
        State::Density(rho) => json!({"kind": "density", "dim": rho.rows(), "data": rows_to_value(rho)}),
    }
}

/// Decodes and validates a state: unit norm for vectors; Hermitian, PSD and
/// unit trace for densities, each within `tol`.
pub fn state_from_value(v: &Value, tol: f64) -> Result<State, DecodeError> {
    if !v.is_object() {
        return Err(DecodeError::new("", "expected a state object"));
    }
    let dim = usize_field(v, "dim")?;
    let data = v.get("data").ok_or_else(|| DecodeError::new("", "missing field \"data\""))?;
    match v.get("kind").and_then(Value::as_str) {
        Some("vector") => {
            let arr = data.as_array().ok_or_else(|| DecodeError::new("data", "expected an array"))?;
            if arr.len() != dim {
                return Err(DecodeError::new("data", format!("expected {dim} entries, found {}", arr.len())));
            }
            let xi = arr
                .iter()
                .enumerate()
                .map(|(k, z)| complex_from_value(z, &format!("data[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            State::vector(xi, tol).map_err(|e| DecodeError::new("data", e.to_string()))
        }
        Some("density") => {
            let rho = rows_from_value(data, dim, dim)?;
            State::density(rho, tol).map_err(|e| DecodeError::new("data", e.to_string()))
        }
        Some(other) => Err(DecodeError::new("kind", format!("unknown state kind {other:?}"))),
        None => Err(DecodeError::new("kind", "missing state kind (\"vector\" or \"density\")")),
    }
}

/// Pretty JSON text of a value, newline-terminated.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
