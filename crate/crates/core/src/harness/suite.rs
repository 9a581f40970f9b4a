use std::time::Instant;

use serde_json::Value;

use crate::dilation::{
    double_commutation_residual, doubly_commuting_dilation, finite_unitary_dilation, minimal_reducing_subspace,
    reducing_residual, verify_power_dilation, DilationResult, PowerResidual, SignedPowerWord,
};
use crate::free_product::{dilated_state, free_unitary_dilation, FreeDilationScenario, FreeParams, DEFAULT_FOCK_CAP};
use crate::ncprob::{
    faithfulness_check, free_independence_check, make_tensor_independent, tensor_independence_check, trace_check,
    format_product, parse_product, Element, Family, FreeCheckParams, FreeOracle, Marginal, TensorCheckParams, TraceCheckParams, Word,
};
use crate::operator::{ComplexMatrix, Embedding, State};

use super::report::{Entry, Report};
use super::scenario::{scenario_to_value, InputDigest, Mode, Scenario};
use super::IngestError;

struct Outcome {
    residual: Option<f64>,
    witness: Option<String>,
    pass: bool,
    message: Option<String>,
}

impl Outcome {
    fn within(residual: f64, tol: f64, witness: Option<String>) -> Self {
        Self {
            residual: Some(residual),
            witness,
            pass: residual <= tol,
            message: None,
        }
    }

    fn note(mut self, message: String) -> Self {
        self.message = Some(message);
        self
    }
}

#[derive(Default)]
struct Run {
    entries: Vec<Entry>,
    times: Vec<f64>,
}

impl Run {
    fn check(&mut self, name: &str, budget: String, f: impl FnOnce() -> Result<Outcome, String>) {
        let start = Instant::now();
        let entry = match f() {
            Ok(o) => Entry {
                name: name.to_string(),
                residual: o.residual.map(|r| if r.is_finite() { r } else { f64::MAX }),
                budget,
                witness: o.witness,
                pass: o.pass,
                message: o.message,
            },
            Err(message) => Entry {
                name: name.to_string(),
                residual: None,
                budget,
                witness: None,
                pass: false,
                message: Some(message),
            },
        };
        self.entries.push(entry);
        self.times.push(start.elapsed().as_secs_f64() * 1e3);
    }

    /// Runs a construction step; on failure records a failing entry.
    fn build<T>(&mut self, name: &str, budget: String, f: impl FnOnce() -> Result<T, String>) -> Option<T> {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match out {
            Ok(v) => Some(v),
            Err(message) => {
                self.entries.push(Entry {
                    name: name.to_string(),
                    residual: None,
                    budget,
                    witness: None,
                    pass: false,
                    message: Some(message),
                });
                self.times.push(ms);
                None
            }
        }
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Largest residual and its witness; the first of equal maxima wins.
fn worst<I: IntoIterator<Item = (f64, String)>>(items: I) -> (f64, Option<String>) {
    let mut best: (f64, Option<String>) = (0.0, None);
    for (r, w) in items {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if best.1.is_none() || r > best.0 {
            best = (r, Some(w));
        }
    }
    best
}

/// Runs the construction of the scenario's mode and every applicable check.
/// Failures become failing entries.
pub fn run_theorem_suite(sc: &Scenario, inputs: &[InputDigest]) -> Report {
    let start = Instant::now();
    let mut run = Run::default();
    match sc.mode {
        Mode::Single => single_suite(sc, &mut run),
        Mode::Doubly => {
            let ts: Vec<ComplexMatrix> = sc.factors.iter().map(|f| f.matrix.clone()).collect();
            doubly_suite(sc, &ts, &sc.factors[0].state, &mut run, false);
        }
        Mode::Tensor => {
            let pairs: Vec<(ComplexMatrix, State)> =
                sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            if let Some((ts, s)) = run.build("tensor_model", "product dim <= 4096".into(), || {
                make_tensor_independent(&pairs).map_err(err)
            }) {
                doubly_suite(sc, &ts, &s, &mut run, true);
            }
        }
        Mode::Free => free_suite(sc, &mut run),
    }
    Report {
        mode: sc.mode.name().to_string(),
        scenario: scenario_to_value(sc),
        inputs: inputs.to_vec(),
        entries: run.entries,
        entry_ms: run.times,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Report for a scenario that could not be loaded.
pub fn ingestion_failure(e: &IngestError, inputs: &[InputDigest]) -> Report {
    Report {
        mode: "unknown".into(),
        scenario: Value::Null,
        inputs: inputs.to_vec(),
        entries: vec![Entry {
            name: "ingestion".into(),
            residual: None,
            budget: String::new(),
            witness: None,
            pass: false,
            message: Some(e.to_string()),
        }],
        entry_ms: vec![0.0],
        total_ms: 0.0,
    }
}

/// Faithfulness of `state` on words in `t` up to `degree`, then of the
/// pushed state on words in `v` cut down to the smallest subspace reducing
/// `v` that contains the image of `e`.
fn faithful_shadow(t: &ComplexMatrix, state: &State, v: &ComplexMatrix, e: &Embedding, degree: usize, tol: f64) -> Result<Outcome, String> {
    let input = faithfulness_check(state, &Family::new(vec![t.clone()]).map_err(err)?, degree).map_err(err)?;
    if !input.faithful_on_span {
        return Ok(Outcome {
            residual: None,
            witness: None,
            pass: true,
            message: Some(format!(
                "input state not faithful on span (rank {} < {}); nothing to certify",
                input.gram_rank, input.span_dim
            )),
        });
    }
    let m = minimal_reducing_subspace(std::slice::from_ref(v), e, tol.max(1e-10)).map_err(err)?;
    let vm = m.compress(v).map_err(err)?;
    let inner = Embedding::new(m.isometry().adjoint_mul(e.isometry()).map_err(err)?, 1e-8).map_err(err)?;
    let sm = state.push_forward(&inner).map_err(err)?;
    let rep = faithfulness_check(&sm, &Family::new(vec![vm]).map_err(err)?, degree).map_err(err)?;
    let gap = rep.span_dim.abs_diff(rep.gram_rank) as f64;
    Ok(Outcome {
        residual: Some(gap),
        witness: rep.report.worst_witness.clone(),
        pass: rep.faithful_on_span,
        message: Some(format!(
            "span_dim={} gram_rank={} reducing_dim={}",
            rep.span_dim,
            rep.gram_rank,
            m.small_dim()
        )),
    })
}

fn single_suite(sc: &Scenario, run: &mut Run) {
    let n = sc.degree;
    let t = &sc.factors[0].matrix;
    let Some(dil) = run.build("construction", format!("N={n}"), || finite_unitary_dilation(t, n, sc.tol).map_err(err)) else {
        return;
    };
    run.check("unitarity", format!("tol={:e}", sc.tol), || {
        Ok(Outcome::within(dil.unitarity_residual().map_err(err)?, sc.tol, None))
    });
    run.check("power_dilation", format!("|k|<={n}"), || {
        let words = (-(n as i64)..=n as i64).map(|k| SignedPowerWord::new(vec![(0, k)]));
        let mut res = Vec::new();
        for w in words {
            let r = verify_power_dilation(&dil.view(), std::slice::from_ref(t), &w, sc.tol).map_err(err)?;
            res.push((r.residual, w.to_string()));
        }
        let (r, w) = worst(res);
        Ok(Outcome::within(r, sc.tol, w))
    });
    run.check("reducing_subspace", format!("rank tol={:e}", crate::dilation::RANK_TOL), || {
        let m = minimal_reducing_subspace(&dil.unitaries, &dil.embedding, sc.tol.max(1e-10)).map_err(err)?;
        let r = reducing_residual(&dil.unitaries, &m).map_err(err)?;
        Ok(Outcome::within(r, sc.tol, None).note(format!("dim {} of {}", m.small_dim(), dil.ambient_dim)))
    });
    let d = sc.poly_degree.min(n);
    run.check("faithful_on_span", format!("d={d}"), || {
        faithful_shadow(t, &sc.factors[0].state, &dil.unitaries[0], &dil.embedding, d, sc.tol)
    });
}

/// Every word with one letter per factor in increasing order, powers in
/// `[-N, N]`, zero powers omitted.
fn ordered_words(n_factors: usize, degree: usize) -> Vec<SignedPowerWord> {
    let n = degree as i64;
    let mut out = vec![SignedPowerWord::empty()];
    for f in 0..n_factors {
        out = out
            .into_iter()
            .flat_map(|w| {
                (-n..=n).map(move |k| {
                    let mut letters = w.letters.clone();
                    if k != 0 {
                        letters.push((f, k));
                    }
                    SignedPowerWord::new(letters)
                })
            })
            .collect();
    }
    out
}

fn doubly_suite(sc: &Scenario, ts: &[ComplexMatrix], state: &State, run: &mut Run, tensor: bool) {
    let n = sc.degree;
    run.check("input_double_commutation", format!("tol={:e}", sc.tol), || {
        let (r, pair) = double_commutation_residual(ts).map_err(err)?;
        Ok(Outcome::within(r, sc.tol, pair.map(|(i, j)| format!("factors {i},{j}"))))
    });
    let Some(dil): Option<DilationResult> = run.build("construction", format!("N={n}"), || {
        doubly_commuting_dilation(ts, n, sc.tol).map_err(err)
    }) else {
        return;
    };
    run.check("unitarity", format!("tol={:e}", sc.tol), || {
        Ok(Outcome::within(dil.unitarity_residual().map_err(err)?, sc.tol, None))
    });
    run.check("output_double_commutation", format!("tol={:e}", sc.tol), || {
        let (r, pair) = double_commutation_residual(&dil.unitaries).map_err(err)?;
        Ok(Outcome::within(r, sc.tol, pair.map(|(i, j)| format!("unitaries {i},{j}"))))
    });
    run.check("word_dilation", format!("|k_i|<={n}"), || {
        let mut res = Vec::new();
        for w in ordered_words(ts.len(), n) {
            let r = verify_power_dilation(&dil.view(), ts, &w, sc.tol).map_err(err)?;
            res.push((r.residual, w.to_string()));
        }
        let (r, w) = worst(res);
        Ok(Outcome::within(r, sc.tol, w))
    });
    if tensor {
        let p = TensorCheckParams {
            degree: sc.poly_degree,
            samples: sc.samples,
            seed: sc.seed,
            tol: sc.tol,
        };
        run.check(
            "tensor_independence",
            format!("d={} samples={} seed={}", p.degree, p.samples, p.seed),
            || {
                let s = state.push_forward(&dil.embedding).map_err(err)?;
                let fam = Family::new(dil.unitaries.clone()).map_err(err)?;
                let rep = tensor_independence_check(&s, &fam, p).map_err(err)?;
                Ok(Outcome::within(rep.max_residual, sc.tol, rep.worst_witness))
            },
        );
    }
}

fn free_params(sc: &Scenario) -> FreeParams {
    FreeParams {
        degree: sc.degree,
        trunc: sc.trunc,
        tol: sc.tol,
        cap: DEFAULT_FOCK_CAP,
    }
}

fn free_suite(sc: &Scenario, run: &mut Run) {
    let (n, l) = (sc.degree, sc.trunc);
    let factors: Vec<(ComplexMatrix, State)> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
    let Some(fds): Option<FreeDilationScenario> = run.build("construction", format!("N={n} L={l}"), || {
        free_unitary_dilation(&factors, &free_params(sc)).map_err(err)
    }) else {
        return;
    };
    let vacuum = dilated_state(&fds);
    run.check("fock_dimension", format!("cap={DEFAULT_FOCK_CAP}"), || {
        Ok(Outcome {
            residual: None,
            witness: None,
            pass: true,
            message: Some(format!("F(K)={} F(H)={}", fds.fock_k.dim(), fds.fock_h.dim())),
        })
    });
    run.check("domain_unitarity", format!("labels shorter than L={l}"), || {
        let mut res = Vec::new();
        for i in 0..fds.len() {
            res.push((fds.domain_unitarity_residual(i).map_err(err)?, format!("U{i}")));
        }
        let (r, w) = worst(res);
        Ok(Outcome::within(r, sc.tol, w))
    });
    run.check("j_isometry", String::new(), || Ok(Outcome::within(fds.j_isometry_residual(), sc.tol, None)));
    run.check("joint_dilation", format!("k>=0 sum k<={n} alternation<={l}"), || {
        let mut res = Vec::new();
        for w in fds.budget_words() {
            let r = fds.verify_word(&w, sc.tol).map_err(err)?;
            res.push((r.residual, w.to_string()));
        }
        let (r, w) = worst(res);
        Ok(Outcome::within(r, sc.tol, w))
    });
    let fp = FreeCheckParams {
        max_len: sc.max_alt.min(l),
        degree: sc.poly_degree.min(n),
        samples: sc.samples,
        seed: sc.seed,
        tol: sc.tol,
        pattern_cap: 512,
    };
    run.check(
        "free_independence",
        format!("m<={} d={} samples={} seed={}", fp.max_len, fp.degree, fp.samples, fp.seed),
        || {
            let rep = free_independence_check(&vacuum, &fds.unitaries, fp).map_err(err)?;
            Ok(Outcome::within(rep.max_residual, sc.tol, rep.worst_witness))
        },
    );
    let tp = TraceCheckParams {
        degree: sc.poly_degree,
        samples: sc.samples,
        seed: sc.seed,
        tol: sc.tol,
        max_alt: Some(l),
    };
    run.check("trace", format!("d={} pairs={} alternation<={l}", tp.degree, tp.samples), || {
        let rep = trace_check(&vacuum, &fds.unitaries, tp).map_err(err)?;
        Ok(Outcome::within(rep.max_residual, sc.tol, rep.worst_witness))
    });
    run.check("oracle_equivalence", format!("words of length <= {l}"), || {
        let margs = fds.marginals().map_err(err)?;
        let dyn_margs: Vec<&dyn Marginal> = margs.iter().map(|m| m as &dyn Marginal).collect();
        let mut oracle = FreeOracle::new(dyn_margs);
        let factors: Vec<usize> = (0..fds.len()).collect();
        let mut res = Vec::new();
        for w in Word::all_up_to(&factors, l) {
            let fock = fds.unitaries.moment(&vacuum, &w).map_err(err)?;
            let orc = oracle.moment(&w).map_err(err)?;
            res.push(((fock - orc).norm(), format_product(&[Element::word(w)])));
        }
        let (r, w) = worst(res);
        Ok(Outcome::within(r, sc.tol, w))
    });
    let d = sc.poly_degree.min(n);
    for i in 0..fds.len() {
        run.check(&format!("faithful_on_span[{i}]"), format!("d={d}"), || {
            let (v, _) = fds.factor_cyclic(i).map_err(err)?;
            let t = &fds.contractions[i];
            let e = Embedding::leading(v.rows(), t.rows()).map_err(err)?;
            let state = State::basis(t.rows(), 0);
            // in the factor's (ξ, complement) basis the input state is e₀
            let b = fds.fock_h.factors()[i].basis_matrix();
            let t_local = b.adjoint_mul(&t.mul(&b).map_err(err)?).map_err(err)?;
            let mut out = faithful_shadow(&t_local, &state, &v, &e, d, sc.tol)?;
            out.witness = out.witness.map(|w| relabel(&w, i));
            Ok(out)
        });
    }
}

/// Dilation residual of one power word under the scenario's construction.
pub fn dilation_residual(sc: &Scenario, word: &SignedPowerWord) -> Result<PowerResidual, String> {
    let mats: Vec<ComplexMatrix> = sc.factors.iter().map(|f| f.matrix.clone()).collect();
    match sc.mode {
        Mode::Single => {
            let dil = finite_unitary_dilation(&mats[0], sc.degree, sc.tol).map_err(err)?;
            verify_power_dilation(&dil.view(), &mats, word, sc.tol).map_err(err)
        }
        Mode::Doubly => {
            let dil = doubly_commuting_dilation(&mats, sc.degree, sc.tol).map_err(err)?;
            verify_power_dilation(&dil.view(), &mats, word, sc.tol).map_err(err)
        }
        Mode::Tensor => {
            let pairs: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let (ts, _) = make_tensor_independent(&pairs).map_err(err)?;
            let dil = doubly_commuting_dilation(&ts, sc.degree, sc.tol).map_err(err)?;
            verify_power_dilation(&dil.view(), &ts, word, sc.tol).map_err(err)
        }
        Mode::Free => {
            let factors: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let fds = free_unitary_dilation(&factors, &free_params(sc)).map_err(err)?;
            fds.verify_word(word, sc.tol).map_err(err)
        }
    }
}

/// Moves a one-factor witness onto factor `i`.
fn relabel(witness: &str, i: usize) -> String {
    match parse_product(witness) {
        Ok(els) => {
            let moved: Vec<Element> = els
                .into_iter()
                .map(|el| {
                    Element::new(
                        el.terms
                            .into_iter()
                            .map(|(c, mut w)| {
                                w.letters.iter_mut().for_each(|l| l.factor = i);
                                (c, w)
                            })
                            .collect(),
                    )
                })
                .collect();
            format_product(&moved)
        }
        Err(_) => witness.to_string(),
    }
}

/// Which generators a standalone check or moment runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// The scenario's matrices: a product model in tensor mode, their
    /// free product in free mode.
    Input,
    /// The unitaries produced by the scenario's dilation.
    Dilated,
}

pub struct BuiltFamily {
    pub family: Family,
    pub state: State,
    /// Longest alternation for which moments are exact, when limited.
    pub alternation_budget: Option<usize>,
}

pub fn build_family(sc: &Scenario, kind: FamilyKind) -> Result<BuiltFamily, String> {
    let mats: Vec<ComplexMatrix> = sc.factors.iter().map(|f| f.matrix.clone()).collect();
    let state0 = sc.factors[0].state.clone();
    let plain = |family, state| BuiltFamily {
        family,
        state,
        alternation_budget: None,
    };
    match (kind, sc.mode) {
        (FamilyKind::Input, Mode::Tensor) => {
            let pairs: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let (g, s) = make_tensor_independent(&pairs).map_err(err)?;
            Ok(plain(Family::new(g).map_err(err)?, s))
        }
        (FamilyKind::Input, Mode::Free) => {
            let factors: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let fds = free_unitary_dilation(&factors, &free_params(sc)).map_err(err)?;
            Ok(BuiltFamily {
                state: fds.original_state(),
                family: fds.originals,
                alternation_budget: Some(sc.trunc),
            })
        }
        (FamilyKind::Input, _) => Ok(plain(Family::new(mats).map_err(err)?, state0)),
        (FamilyKind::Dilated, Mode::Single) => {
            let dil = finite_unitary_dilation(&mats[0], sc.degree, sc.tol).map_err(err)?;
            let s = state0.push_forward(&dil.embedding).map_err(err)?;
            Ok(plain(Family::new(dil.unitaries).map_err(err)?, s))
        }
        (FamilyKind::Dilated, Mode::Doubly | Mode::Tensor) => {
            let (ts, s) = if sc.mode == Mode::Tensor {
                let pairs: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
                make_tensor_independent(&pairs).map_err(err)?
            } else {
                (mats, state0)
            };
            let dil = doubly_commuting_dilation(&ts, sc.degree, sc.tol).map_err(err)?;
            let s = s.push_forward(&dil.embedding).map_err(err)?;
            Ok(plain(Family::new(dil.unitaries).map_err(err)?, s))
        }
        (FamilyKind::Dilated, Mode::Free) => {
            let factors: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let fds = free_unitary_dilation(&factors, &free_params(sc)).map_err(err)?;
            Ok(BuiltFamily {
                state: dilated_state(&fds),
                family: fds.unitaries,
                alternation_budget: Some(sc.trunc),
            })
        }
    }
}
