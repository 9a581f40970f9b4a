use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::operator::{operator_norm, ComplexMatrix, State};

use super::io::{matrix_from_value, matrix_to_value, state_from_value, state_to_value, to_pretty, DecodeError};
use super::lines::{line_of, value_lines};
use super::IngestError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Doubly,
    Tensor,
    Free,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Doubly => "doubly",
            Mode::Tensor => "tensor",
            Mode::Free => "free",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "single" => Mode::Single,
            "doubly" => Mode::Doubly,
            "tensor" => Mode::Tensor,
            "free" => Mode::Free,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub matrix: ComplexMatrix,
    pub state: State,
}

/// A validated scenario: factors plus budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub mode: Mode,
    pub factors: Vec<Factor>,
    /// Dilation degree `N`.
    pub degree: usize,
    /// Fock truncation length `L`.
    pub trunc: usize,
    /// Polynomial degree `d` of random elements and words in checks.
    pub poly_degree: usize,
    /// Longest alternating pattern `m` in the freeness check.
    pub max_alt: usize,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn new(mode: Mode, factors: Vec<Factor>) -> Self {
        Self {
            mode,
            factors,
            degree: 3,
            trunc: 4,
            poly_degree: 3,
            max_alt: 4,
            tol: 1e-8,
            samples: 100,
            seed: 0,
        }
    }
}

/// Budget overrides from the command line.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub degree: Option<usize>,
    pub trunc: Option<usize>,
    pub poly_degree: Option<usize>,
    pub max_alt: Option<usize>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Scenario {
    /// Factor-count and dimension rules of the scenario's mode.
    pub fn check_mode(&self) -> Result<(), DecodeError> {
        let fail = |path: &str, message: String| Err(DecodeError { path: path.to_string(), message });
        match self.mode {
            Mode::Single if self.factors.len() != 1 => {
                fail("factors", format!("mode single takes exactly one factor, got {}", self.factors.len()))
            }
            Mode::Doubly => {
                let d = self.factors[0].matrix.rows();
                match self.factors.iter().position(|f| f.matrix.rows() != d) {
                    Some(i) => fail(
                        &format!("factors[{i}].matrix"),
                        format!("mode doubly needs all factors on one space of dimension {d}"),
                    ),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

impl Overrides {
    pub fn apply(&self, sc: &mut Scenario) {
        sc.mode = self.mode.unwrap_or(sc.mode);
        sc.degree = self.degree.unwrap_or(sc.degree);
        sc.trunc = self.trunc.unwrap_or(sc.trunc);
        sc.poly_degree = self.poly_degree.unwrap_or(sc.poly_degree);
        sc.max_alt = self.max_alt.unwrap_or(sc.max_alt);
        sc.tol = self.tol.unwrap_or(sc.tol);
        sc.samples = self.samples.unwrap_or(sc.samples);
        sc.seed = self.seed.unwrap_or(sc.seed);
    }
}

/// SHA-256 of one input file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        Self {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ingested {
    pub scenario: Scenario,
    pub inputs: Vec<InputDigest>,
}

/// Scenario JSON with every matrix and state inline.
pub fn emit(sc: &Scenario) -> String {
    to_pretty(&scenario_to_value(sc))
}

pub fn scenario_to_value(sc: &Scenario) -> Value {
    json!({
        "mode": sc.mode.name(),
        "factors": sc.factors.iter().map(|f| json!({
            "matrix": matrix_to_value(&f.matrix),
            "state": state_to_value(&f.state),
        })).collect::<Vec<_>>(),
        "degree": sc.degree,
        "trunc": sc.trunc,
        "poly_degree": sc.poly_degree,
        "max_alt": sc.max_alt,
        "tol": sc.tol,
        "samples": sc.samples,
        "seed": sc.seed,
    })
}

/// One JSON document with its origin, for error locations.
struct Source {
    name: String,
    lines: std::collections::HashMap<String, usize>,
}

impl Source {
    fn new(name: &str, text: &str) -> Self {
        Self {
            name: name.to_string(),
            lines: value_lines(text),
        }
    }

    fn error(&self, e: DecodeError) -> IngestError {
        IngestError {
            origin: self.name.clone(),
            line: line_of(&self.lines, &e.path),
            path: e.path,
            message: e.message,
        }
    }
}

fn parse_json(name: &str, text: &str) -> Result<Value, IngestError> {
    serde_json::from_str(text).map_err(|e| IngestError {
        origin: name.to_string(),
        line: Some(e.line()),
        path: String::new(),
        message: format!("invalid JSON: {e}"),
    })
}

fn read_file(path: &Path) -> Result<Vec<u8>, IngestError> {
    std::fs::read(path).map_err(|e| IngestError {
        origin: path.display().to_string(),
        line: None,
        path: String::new(),
        message: format!("cannot read file: {e}"),
    })
}

/// Reads a scenario file and every file it references, validating all of
/// them.
pub fn ingest(path: &Path) -> Result<Ingested, IngestError> {
    let bytes = read_file(path)?;
    let name = path.display().to_string();
    let text = String::from_utf8(bytes.clone()).map_err(|_| IngestError {
        origin: name.clone(),
        line: None,
        path: String::new(),
        message: "file is not UTF-8".into(),
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut inputs = vec![InputDigest::of(&name, &bytes)];
    let scenario = ingest_text(&name, &text, &base, &mut inputs)?;
    Ok(Ingested { scenario, inputs })
}

/// Parses scenario text; file references resolve against `base` and are
/// recorded in `inputs`.
pub fn ingest_text(name: &str, text: &str, base: &Path, inputs: &mut Vec<InputDigest>) -> Result<Scenario, IngestError> {
    let root = parse_json(name, text)?;
    let src = Source::new(name, text);
    let obj = root
        .as_object()
        .ok_or_else(|| src.error(DecodeError { path: String::new(), message: "scenario must be a JSON object".into() }))?;
    let err = |path: &str, message: String| src.error(DecodeError { path: path.to_string(), message });

    let known = ["mode", "factors", "degree", "trunc", "poly_degree", "max_alt", "tol", "samples", "seed"];
    if let Some(k) = obj.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(err(k, format!("unknown field {k:?}")));
    }
    let mode = match obj.get("mode") {
        None => Mode::Free,
        Some(v) => v
            .as_str()
            .and_then(Mode::parse)
            .ok_or_else(|| err("mode", format!("mode must be one of single, doubly, tensor, free; got {v}")))?,
    };
    let count = |key: &str, default: usize| -> Result<usize, IngestError> {
        match obj.get(key) {
            None => Ok(default),
            Some(v) => match v.as_u64() {
                Some(x) if x >= 1 => Ok(x as usize),
                _ => Err(err(key, format!("{key} must be a positive integer, got {v}"))),
            },
        }
    };
    let mut sc = Scenario::new(mode, Vec::new());
    sc.degree = count("degree", sc.degree)?;
    sc.trunc = count("trunc", sc.trunc)?;
    sc.poly_degree = count("poly_degree", sc.poly_degree)?;
    sc.max_alt = count("max_alt", sc.trunc)?;
    sc.samples = count("samples", sc.samples)?;
    if let Some(v) = obj.get("seed") {
        sc.seed = v.as_u64().ok_or_else(|| err("seed", format!("seed must be a nonnegative integer, got {v}")))?;
    }
    if let Some(v) = obj.get("tol") {
        sc.tol = v
            .as_f64()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| err("tol", format!("tol must be a positive number, got {v}")))?;
    }

    let factors = obj
        .get("factors")
        .ok_or_else(|| err("", "missing field \"factors\"".into()))?
        .as_array()
        .ok_or_else(|| err("factors", "factors must be an array".into()))?;
    if factors.is_empty() {
        return Err(err("factors", "at least one factor is required".into()));
    }
    for (i, f) in factors.iter().enumerate() {
        let at = format!("factors[{i}]");
        let fobj: &Map<String, Value> = f
            .as_object()
            .ok_or_else(|| err(&at, "factor must be an object with \"matrix\" and \"state\"".into()))?;
        let matrix = load_part(&src, fobj, &at, "matrix", base, inputs, matrix_from_value)?;
        let state = load_part(&src, fobj, &at, "state", base, inputs, |v| state_from_value(v, sc.tol))?;
        if !matrix.is_square() {
            return Err(err(&format!("{at}.matrix"), format!("matrix is {}x{}, expected square", matrix.rows(), matrix.cols())));
        }
        if matrix.rows() != state.dim() {
            return Err(err(
                &at,
                format!("matrix is {0}x{0} but its state has dimension {1}", matrix.rows(), state.dim()),
            ));
        }
        let norm = operator_norm(&matrix).map_err(|e| err(&format!("{at}.matrix"), e.to_string()))?;
        if norm > 1.0 + sc.tol {
            return Err(err(&format!("{at}.matrix"), format!("not a contraction: operator norm {norm}")));
        }
        sc.factors.push(Factor { matrix, state });
    }
    sc.check_mode().map_err(|e| src.error(e))?;
    Ok(sc)
}

/// A factor part given inline or as a path to a JSON file.
fn load_part<T>(
    src: &Source,
    fobj: &Map<String, Value>,
    at: &str,
    key: &str,
    base: &Path,
    inputs: &mut Vec<InputDigest>,
    decode: impl Fn(&Value) -> Result<T, DecodeError>,
) -> Result<T, IngestError> {
    let here = format!("{at}.{key}");
    let v = fobj.get(key).ok_or_else(|| {
        src.error(DecodeError {
            path: at.to_string(),
            message: format!("missing field {key:?}"),
        })
    })?;
    match v {
        Value::String(rel) => {
            let path: PathBuf = base.join(rel);
            let bytes = read_file(&path)?;
            let name = path.display().to_string();
            let text = String::from_utf8_lossy(&bytes).into_owned();
            inputs.push(InputDigest::of(&name, &bytes));
            let inner = parse_json(&name, &text)?;
            decode(&inner).map_err(|e| Source::new(&name, &text).error(e))
        }
        _ => decode(v).map_err(|e| src.error(e.under(&here))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Complex64;
    use crate::random::{contraction, density_state, rng, vector_state};

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn parse(text: &str) -> Result<Scenario, IngestError> {
        ingest_text("mem.json", text, Path::new("."), &mut Vec::new())
    }

    #[test]
    fn emit_ingest_roundtrip() {
        let mut g = rng(44);
        let mut sc = Scenario::new(
            Mode::Tensor,
            vec![
                Factor { matrix: contraction(&mut g, 2), state: vector_state(&mut g, 2) },
                Factor { matrix: contraction(&mut g, 3), state: density_state(&mut g, 3) },
            ],
        );
        sc.tol = 1.5e-9;
        sc.seed = 99;
        let back = parse(&emit(&sc)).unwrap();
        assert_eq!(back, sc);
        assert_eq!(emit(&back), emit(&sc));
    }

    #[test]
    fn defaults_and_mode() {
        let sc = parse(r#"{"factors":[{"matrix":{"rows":1,"cols":1,"data":[[[0.5,0]]]},
            "state":{"kind":"vector","dim":1,"data":[[1,0]]}}],"degree":3,"trunc":4}"#)
        .unwrap();
        assert_eq!(sc.mode, Mode::Free);
        assert_eq!((sc.degree, sc.trunc, sc.max_alt, sc.samples), (3, 4, 4, 100));
        assert_eq!(sc.factors[0].matrix.get(0, 0), r(0.5));
    }

    #[test]
    fn errors_name_line_and_cause() {
        let text = "{\n \"factors\": [\n  {\"matrix\": {\"rows\":1,\"cols\":1,\"data\":[[[0.5,0]]]},\n   \"state\": {\"kind\":\"vector\",\"dim\":2,\n     \"data\":[[0.5,0],[0,0]]}}\n ]\n}";
        let e = parse(text).unwrap_err();
        assert!(e.to_string().contains("mem.json:5"), "{e}");
        assert!(e.message.contains("norm 0.5"), "{e}");

        let text = "{\"factors\":[{\"matrix\":{\"rows\":2,\"cols\":2,\"data\":[[[1,0],[0,0]],[[0,0],[0,0]]]},\n\"state\":{\"kind\":\"density\",\"dim\":2,\"data\":[[[1.01,0],[0,0]],[[0,0],[-0.01,0]]]}}]}";
        let e = parse(text).unwrap_err();
        assert!(e.message.contains("not PSD") && e.message.contains("-1e-2"), "{e}");
        assert_eq!(e.line, Some(2));

        let e = parse("{\"factors\": [1,}").unwrap_err();
        assert!(e.message.contains("invalid JSON"));
        assert_eq!(e.line, Some(1));

        let e = parse(r#"{"factors":[{"matrix":{"rows":1,"cols":1,"data":[[[2,0]]]},"state":{"kind":"vector","dim":1,"data":[[1,0]]}}]}"#)
            .unwrap_err();
        assert!(e.message.contains("not a contraction"));
        let e = parse(r#"{"mode":"single","factors":[]}"#).unwrap_err();
        assert!(e.message.contains("at least one"));
        let e = parse(r#"{"factors":[{"matrix":{"rows":1,"cols":1,"data":[[[0,0]]]},"state":{"kind":"vector","dim":1,"data":[[1,0]]}}],"degree":0}"#)
            .unwrap_err();
        assert_eq!(e.path, "degree");
    }

    #[test]
    fn file_references_are_hashed() {
        let dir = tempfile::tempdir().unwrap();
        let m = matrix_to_value(&ComplexMatrix::scalar(r(0.5)));
        std::fs::write(dir.path().join("t.json"), to_pretty(&m)).unwrap();
        std::fs::write(dir.path().join("bad.json"), "{\"rows\":1,\n\"cols\":1,\n\"data\":[[[0.5]]]}").unwrap();
        let sc_path = dir.path().join("sc.json");
        std::fs::write(
            &sc_path,
            r#"{"mode":"single","factors":[{"matrix":"t.json","state":{"kind":"vector","dim":1,"data":[[1,0]]}}]}"#,
        )
        .unwrap();
        let ing = ingest(&sc_path).unwrap();
        assert_eq!(ing.inputs.len(), 2);
        assert_eq!(ing.inputs[1].sha256.len(), 64);
        assert_eq!(ing.scenario.factors[0].matrix.get(0, 0), r(0.5));

        std::fs::write(
            &sc_path,
            r#"{"mode":"single","factors":[{"matrix":"bad.json","state":{"kind":"vector","dim":1,"data":[[1,0]]}}]}"#,
        )
        .unwrap();
        let e = ingest(&sc_path).unwrap_err();
        assert!(e.origin.ends_with("bad.json"));
        assert_eq!(e.line, Some(3));
        assert!(ingest(&dir.path().join("missing.json")).is_err());
    }
}
