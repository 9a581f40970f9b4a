use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use freedil::dilation::{finite_unitary_dilation, doubly_commuting_dilation, SignedPowerWord};
use freedil::free_product::{free_unitary_dilation, FreeParams, DEFAULT_FOCK_CAP};
use freedil::harness::{
    build_family, dilation_residual, ingest, ingestion_failure, matrix_to_value, run_theorem_suite, state_to_value,
    to_pretty, Entry, FamilyKind, Ingested, Mode, Overrides, Report, Scenario,
};
use freedil::ncprob::{
    faithfulness_check, free_cumulants, free_independence_check, free_mixed_moment_oracle, make_tensor_independent,
    moments_from_cumulants, noncrossing_partitions, parse_product, tensor_independence_check, trace_check, Element,
    FreeCheckParams, Marginal, MatrixMarginal, TensorCheckParams, TraceCheckParams, Word,
};

const EXIT_CHECK: u8 = 1;
const EXIT_INGEST: u8 = 3;
const EXIT_EVAL: u8 = 4;

#[derive(Parser)]
#[command(name = "freedil", version, about = "Unitary dilations of contractions with numerical certification")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario JSON file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Dilation degree N
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Fock truncation length L
    #[arg(long, global = true)]
    trunc_len: Option<usize>,
    /// Polynomial degree d for the independence and trace checks
    #[arg(long, global = true)]
    poly_degree: Option<usize>,
    #[arg(long, global = true)]
    max_alt: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Leave wall-clock timings out of reports
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Tensor,
    Free,
    Trace,
    Faithful,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Input,
    Dilated,
}

impl From<Which> for FamilyKind {
    fn from(w: Which) -> Self {
        match w {
            Which::Input => FamilyKind::Input,
            Which::Dilated => FamilyKind::Dilated,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dilate one contraction and verify the power dilation
    Dilate(SaveArgs),
    /// Dilate a doubly commuting tuple
    DilateDoubly(SaveArgs),
    /// Free unitary dilation on the truncated Fock space
    DilateFree(SaveArgs),
    /// Run one property check on the input or dilated family
    Check {
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, value_enum, default_value_t = Which::Dilated)]
        family: Which,
    },
    /// Evaluate a product of elements, or the dilation residual of a power word
    Moments {
        /// Product such as "{(1,0)[0 1*]}{(0.5,0)[] + (1,0)[1^2]}"
        #[arg(long, conflicts_with = "word")]
        expr: Option<String>,
        /// Power word such as "0^2 1^-1"
        #[arg(long)]
        word: Option<String>,
        #[arg(long, value_enum, default_value_t = Which::Dilated)]
        family: Which,
    },
    /// Free cumulants from moments (or back)
    Cumulants {
        /// JSON array of numbers or [re, im] pairs
        #[arg(long)]
        moments: String,
        /// Treat the array as cumulants and return moments
        #[arg(long)]
        inverse: bool,
    },
    /// List the non-crossing partitions of {1..k}
    Ncpartitions {
        #[arg(long)]
        k: usize,
        /// Print only the count
        #[arg(long)]
        count: bool,
    },
    /// Mixed moment of free copies from their marginals
    Oracle {
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = Which::Dilated)]
        family: Which,
    },
    /// Run every check for the scenario's mode
    Suite,
}

#[derive(Args)]
struct SaveArgs {
    /// Directory for the dilated unitaries, the embedding and the state
    #[arg(long)]
    save: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn eval(message: impl ToString) -> Self {
        Self {
            code: EXIT_EVAL,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn overrides(g: &Global, mode: Option<Mode>) -> Overrides {
    Overrides {
        mode,
        degree: g.degree,
        trunc: g.trunc_len,
        poly_degree: g.poly_degree,
        max_alt: g.max_alt,
        tol: g.tol,
        samples: g.samples,
        seed: g.seed,
    }
}

/// Loads the scenario; a failure is written out as an ingestion report.
fn load(g: &Global, mode: Option<fn(Mode) -> Mode>) -> Result<Ingested, Failure> {
    let path = g.input.as_ref().ok_or(Failure {
        code: EXIT_INGEST,
        message: "--input is required".into(),
    })?;
    let fail = |e: freedil::harness::IngestError| {
        let inputs = match fs::read(path) {
            Ok(bytes) => vec![freedil::harness::InputDigest::of(&path.display().to_string(), &bytes)],
            Err(_) => Vec::new(),
        };
        let rep = ingestion_failure(&e, &inputs);
        let _ = emit_report(g, &rep);
        Failure {
            code: EXIT_INGEST,
            message: e.to_string(),
        }
    };
    let mut ing = ingest(path).map_err(fail)?;
    let forced = mode.map(|f| f(ing.scenario.mode));
    overrides(g, forced).apply(&mut ing.scenario);
    ing.scenario.check_mode().map_err(|e| {
        fail(freedil::harness::IngestError {
            origin: path.display().to_string(),
            line: None,
            path: e.path,
            message: e.message,
        })
    })?;
    Ok(ing)
}

fn write_out(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::eval(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(g: &Global, rep: &Report) -> Result<(), Failure> {
    let timing = !g.no_timing;
    let text = match g.format {
        Format::Json => rep.to_json(timing),
        Format::Text => rep.to_text(timing),
    };
    write_out(g, &text)
}

fn emit_value(g: &Global, v: &Value) -> Result<(), Failure> {
    let text = match g.format {
        Format::Json => to_pretty(v),
        Format::Text => text_lines(v),
    };
    write_out(g, &text)
}

fn text_lines(v: &Value) -> String {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, x)| match x {
                Value::String(s) => format!("{k}: {s}\n"),
                other => format!("{k}: {other}\n"),
            })
            .collect(),
        other => format!("{other}\n"),
    }
}

fn verdict(pass: bool) -> u8 {
    if pass {
        0
    } else {
        EXIT_CHECK
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Dilate(s) => dilate(g, |_| Mode::Single, s),
        Command::DilateDoubly(s) => dilate(g, |m| if m == Mode::Tensor { m } else { Mode::Doubly }, s),
        Command::DilateFree(s) => dilate(g, |_| Mode::Free, s),
        Command::Suite => {
            let ing = load(g, None)?;
            let rep = run_theorem_suite(&ing.scenario, &ing.inputs);
            emit_report(g, &rep)?;
            Ok(verdict(rep.pass()))
        }
        Command::Check { property, family } => check(g, *property, *family),
        Command::Moments { expr, word, family } => moments(g, expr.as_deref(), word.as_deref(), *family),
        Command::Cumulants { moments, inverse } => cumulants(g, moments, *inverse),
        Command::Ncpartitions { k, count } => {
            let parts = noncrossing_partitions(*k).map_err(Failure::eval)?;
            let v = if *count {
                json!({"k": k, "count": parts.len()})
            } else {
                json!({"k": k, "count": parts.len(), "partitions": parts.iter().map(|p| p.blocks()).collect::<Vec<_>>()})
            };
            match g.format {
                Format::Json => emit_value(g, &v)?,
                Format::Text => {
                    let mut out = format!("k: {k}\ncount: {}\n", parts.len());
                    if !count {
                        for p in &parts {
                            let blocks: Vec<String> = p
                                .blocks()
                                .iter()
                                .map(|b| format!("{{{}}}", b.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
                                .collect();
                            out.push_str(&blocks.join(" "));
                            out.push('\n');
                        }
                    }
                    write_out(g, &out)?;
                }
            }
            Ok(0)
        }
        Command::Oracle { word, family } => oracle(g, word, *family),
    }
}

fn dilate(g: &Global, mode: fn(Mode) -> Mode, save: &SaveArgs) -> Result<u8, Failure> {
    let ing = load(g, Some(mode))?;
    let rep = run_theorem_suite(&ing.scenario, &ing.inputs);
    if let Some(dir) = &save.save {
        save_dilation(&ing.scenario, dir)?;
    }
    emit_report(g, &rep)?;
    Ok(verdict(rep.pass()))
}

fn save_dilation(sc: &Scenario, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::eval(format!("{}: {e}", dir.display())))?;
    let put = |name: &str, v: &Value| {
        let p = dir.join(name);
        fs::write(&p, to_pretty(v)).map_err(|e| Failure::eval(format!("{}: {e}", p.display())))
    };
    let mats: Vec<_> = sc.factors.iter().map(|f| f.matrix.clone()).collect();
    let (unitaries, iso) = match sc.mode {
        Mode::Single => {
            let d = finite_unitary_dilation(&mats[0], sc.degree, sc.tol).map_err(Failure::eval)?;
            (d.unitaries, d.embedding.isometry().clone())
        }
        Mode::Doubly | Mode::Tensor => {
            let ts = if sc.mode == Mode::Tensor {
                let pairs: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
                make_tensor_independent(&pairs).map_err(Failure::eval)?.0
            } else {
                mats
            };
            let d = doubly_commuting_dilation(&ts, sc.degree, sc.tol).map_err(Failure::eval)?;
            (d.unitaries, d.embedding.isometry().clone())
        }
        Mode::Free => {
            let factors: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let params = FreeParams {
                degree: sc.degree,
                trunc: sc.trunc,
                tol: sc.tol,
                cap: DEFAULT_FOCK_CAP,
            };
            let fds = free_unitary_dilation(&factors, &params).map_err(Failure::eval)?;
            let us = (0..fds.len())
                .map(|i| fds.unitaries.word_matrix(&Word::letter(i, false)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::eval)?;
            (us, fds.embedding().isometry().clone())
        }
    };
    for (i, u) in unitaries.iter().enumerate() {
        put(&format!("U{i}.json"), &matrix_to_value(u))?;
    }
    put("J.json", &matrix_to_value(&iso))?;
    let built = build_family(sc, FamilyKind::Dilated).map_err(Failure::eval)?;
    put("state.json", &state_to_value(&built.state))
}

fn check(g: &Global, property: Property, which: Which) -> Result<u8, Failure> {
    let ing = load(g, None)?;
    let sc = &ing.scenario;
    let built = match build_family(sc, which.into()) {
        Ok(b) => b,
        Err(message) => {
            let rep = single_entry(sc, &ing, "construction", String::new(), None, None, false, Some(message));
            emit_report(g, &rep)?;
            return Ok(EXIT_CHECK);
        }
    };
    let (fam, s) = (&built.family, &built.state);
    let started = std::time::Instant::now();
    let outcome = match property {
        Property::Tensor => tensor_independence_check(
            s,
            fam,
            TensorCheckParams {
                degree: sc.poly_degree,
                samples: sc.samples,
                seed: sc.seed,
                tol: sc.tol,
            },
        )
        .map(|r| (r, None)),
        Property::Free => {
            let max_len = built.alternation_budget.map_or(sc.max_alt, |b| sc.max_alt.min(b));
            let degree = if which == Which::Dilated { sc.poly_degree.min(sc.degree) } else { sc.poly_degree };
            free_independence_check(
                s,
                fam,
                FreeCheckParams {
                    max_len,
                    degree,
                    samples: sc.samples,
                    seed: sc.seed,
                    tol: sc.tol,
                    pattern_cap: 512,
                },
            )
            .map(|r| (r, None))
        }
        Property::Trace => trace_check(
            s,
            fam,
            TraceCheckParams {
                degree: sc.poly_degree,
                samples: sc.samples,
                seed: sc.seed,
                tol: sc.tol,
                max_alt: built.alternation_budget,
            },
        )
        .map(|r| (r, None)),
        Property::Faithful => faithfulness_check(s, fam, built.alternation_budget.map_or(sc.poly_degree, |b| sc.poly_degree.min(b / 2))).map(|r| {
            let note = format!("span_dim={} gram_rank={}", r.span_dim, r.gram_rank);
            (r.report, Some(note))
        }),
    };
    let name = match property {
        Property::Tensor => "tensor",
        Property::Free => "free",
        Property::Trace => "trace",
        Property::Faithful => "faithful",
    };
    let mut rep = match outcome {
        Ok((r, note)) => {
            let budget = r.budgets.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
            let parts = r.parts.iter().map(|(k, v)| format!("{k}={v:e}")).collect::<Vec<_>>().join(" ");
            let message = match note {
                Some(n) => format!("{n} {parts}"),
                None => parts,
            };
            single_entry(sc, &ing, name, budget, Some(r.max_residual), r.worst_witness, r.pass, Some(message))
        }
        Err(e) => single_entry(sc, &ing, name, String::new(), None, None, false, Some(e.to_string())),
    };
    rep.entry_ms = vec![started.elapsed().as_secs_f64() * 1e3];
    rep.total_ms = rep.entry_ms[0];
    emit_report(g, &rep)?;
    Ok(verdict(rep.pass()))
}

#[allow(clippy::too_many_arguments)]
fn single_entry(
    sc: &Scenario,
    ing: &Ingested,
    name: &str,
    budget: String,
    residual: Option<f64>,
    witness: Option<String>,
    pass: bool,
    message: Option<String>,
) -> Report {
    Report {
        mode: sc.mode.name().to_string(),
        scenario: freedil::harness::scenario_to_value(sc),
        inputs: ing.inputs.clone(),
        entries: vec![Entry {
            name: name.to_string(),
            residual,
            budget,
            witness,
            pass,
            message,
        }],
        entry_ms: vec![0.0],
        total_ms: 0.0,
    }
}

fn moments(g: &Global, expr: Option<&str>, word: Option<&str>, which: Which) -> Result<u8, Failure> {
    let ing = load(g, None)?;
    let sc = &ing.scenario;
    if let Some(w) = word {
        let w: SignedPowerWord = w.parse().map_err(|e| Failure::eval(format!("bad word: {e}")))?;
        let r = dilation_residual(sc, &w).map_err(Failure::eval)?;
        emit_value(
            g,
            &json!({"word": w.to_string(), "dilation_residual": r.residual, "pass": r.pass, "tol": sc.tol}),
        )?;
        return Ok(verdict(r.pass));
    }
    let expr = expr.ok_or_else(|| Failure::eval("give --expr or --word"))?;
    let els: Vec<Element> = parse_product(expr).map_err(|e| Failure::eval(format!("bad expression: {e}")))?;
    if els.is_empty() {
        return Err(Failure::eval("empty expression"));
    }
    let built = build_family(sc, which.into()).map_err(Failure::eval)?;
    let (fam, s) = (&built.family, &built.state);
    let mut rotated = els[1..].to_vec();
    rotated.push(els[0].clone());
    let multiply = |xs: &[Element]| xs.iter().fold(Element::unit(), |acc, e| acc.mul(e));
    let product = multiply(&els);
    if let Some(b) = built.alternation_budget {
        let longest = product
            .terms
            .iter()
            .chain(&multiply(&rotated).terms)
            .map(|(_, w)| w.alternation_length())
            .max()
            .unwrap_or(0);
        if longest > b {
            return Err(Failure::eval(format!(
                "expression reaches alternation length {longest}, beyond the exact budget {b} of this family"
            )));
        }
    }
    let value = fam.expect_product(s, &els).map_err(Failure::eval)?;
    let factors: Vec<Complex64> = els.iter().map(|e| fam.expect(s, e)).collect::<Result<_, _>>().map_err(Failure::eval)?;
    let prod: Complex64 = factors.iter().product();
    let cyclic = (value - fam.expect_product(s, &rotated).map_err(Failure::eval)?).norm();
    let norm = fam.element_matrix(&product).map_err(Failure::eval)?.fro_norm();
    let mut v = json!({
        "expr": expr,
        "value": complex_json(value),
        "abs": value.norm(),
        "factor_values": factors.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
        "factorization_residual": (value - prod).norm(),
        "cyclic_residual": cyclic,
        "frobenius_norm": norm,
    });
    if sc.mode == Mode::Free && which == Which::Dilated && els.len() == 1 && els[0].terms.len() == 1 {
        let w = &els[0].terms[0].1;
        let c = els[0].terms[0].0;
        let o = oracle_value(sc, w, Which::Dilated)?;
        v["oracle"] = complex_json(c * o);
        v["oracle_residual"] = json!((value - c * o).norm());
    }
    emit_value(g, &v)?;
    Ok(0)
}

fn oracle_value(sc: &Scenario, w: &Word, which: Which) -> Result<Complex64, Failure> {
    match which {
        Which::Dilated => {
            let factors: Vec<_> = sc.factors.iter().map(|f| (f.matrix.clone(), f.state.clone())).collect();
            let params = FreeParams {
                degree: sc.degree,
                trunc: sc.trunc,
                tol: sc.tol,
                cap: DEFAULT_FOCK_CAP,
            };
            let fds = free_unitary_dilation(&factors, &params).map_err(Failure::eval)?;
            let margs = fds.marginals().map_err(Failure::eval)?;
            let dyn_margs: Vec<&dyn Marginal> = margs.iter().map(|m| m as &dyn Marginal).collect();
            free_mixed_moment_oracle(&dyn_margs, w).map_err(Failure::eval)
        }
        Which::Input => {
            let margs: Vec<MatrixMarginal> =
                sc.factors.iter().map(|f| MatrixMarginal::new(f.matrix.clone(), f.state.clone())).collect();
            let dyn_margs: Vec<&dyn Marginal> = margs.iter().map(|m| m as &dyn Marginal).collect();
            free_mixed_moment_oracle(&dyn_margs, w).map_err(Failure::eval)
        }
    }
}

fn oracle(g: &Global, word: &str, which: Which) -> Result<u8, Failure> {
    let ing = load(g, None)?;
    let w: Word = word.parse().map_err(|e| Failure::eval(format!("bad word: {e}")))?;
    let value = oracle_value(&ing.scenario, &w, which)?;
    emit_value(g, &json!({"word": w.to_string(), "value": complex_json(value)}))?;
    Ok(0)
}

fn parse_numbers(text: &str) -> Result<Vec<Complex64>, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::eval(format!("--moments: {e}")))?;
    let arr = v.as_array().ok_or_else(|| Failure::eval("--moments must be a JSON array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| match x {
            Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(p) if p.len() == 2 && p.iter().all(Value::is_number) => {
                Ok(Complex64::new(p[0].as_f64().unwrap_or(f64::NAN), p[1].as_f64().unwrap_or(f64::NAN)))
            }
            other => Err(Failure::eval(format!("--moments[{i}]: expected a number or [re, im], got {other}"))),
        })
        .collect()
}

fn cumulants(g: &Global, text: &str, inverse: bool) -> Result<u8, Failure> {
    let xs = parse_numbers(text)?;
    let ys = if inverse { moments_from_cumulants(&xs) } else { free_cumulants(&xs) }.map_err(Failure::eval)?;
    let key = if inverse { "moments" } else { "cumulants" };
    emit_value(g, &json!({ key: ys.iter().map(|z| complex_json(*z)).collect::<Vec<_>>() }))?;
    Ok(0)
}
