//! Independence, traciality and faithfulness checks. Random draws use one
//! derived seed per sample, so parallel sweeps report identically to serial
//! ones.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::operator::{hermitian_eigen, inner, psd_rank, psd_sqrt, ComplexMatrix, State};
use crate::random::{derive_seed, rng, unit_disc};

use super::family::Family;
use super::word::{format_product, Element, Word};
use super::NcError;

/// Relative rank threshold for Gram matrices.
pub const GRAM_RANK_TOL: f64 = 1e-9;

/// Largest word list the faithfulness check will build.
pub const FAITHFUL_WORD_CAP: usize = 4096;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub budgets: BTreeMap<String, u64>,
    pub tol: f64,
    pub max_residual: f64,
    /// Max residual of each part of the check.
    pub parts: BTreeMap<String, f64>,
    pub worst_witness: Option<String>,
    pub evaluated: usize,
    pub pass: bool,
}

impl CheckReport {
    fn new(property: &str, tol: f64) -> Self {
        Self {
            property: property.to_string(),
            budgets: BTreeMap::new(),
            tol,
            max_residual: 0.0,
            parts: BTreeMap::new(),
            worst_witness: None,
            evaluated: 0,
            pass: true,
        }
    }

    fn budget(mut self, name: &str, value: usize) -> Self {
        self.budgets.insert(name.to_string(), value as u64);
        self
    }

    /// Folds a part's `(residual, witness)` list in order; the first
    /// occurrence of the largest residual wins.
    fn absorb(&mut self, part: &str, results: Vec<(f64, String)>) {
        self.evaluated += results.len();
        let mut best: Option<(f64, String)> = None;
        for (r, w) in results {
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, w));
            }
        }
        let worst = best.as_ref().map_or(0.0, |(r, _)| *r);
        self.parts.insert(part.to_string(), worst);
        if let Some((r, w)) = best {
            if self.worst_witness.is_none() || r > self.max_residual {
                self.max_residual = r;
                self.worst_witness = Some(w);
            }
        }
        self.pass = self.max_residual <= self.tol;
    }
}

/// `el − φ(el)·1`.
pub fn center(el: &Element, s: &State, family: &Family) -> Result<Element, NcError> {
    Ok(el.minus_scalar(family.expect(s, el)?).simplified())
}

/// Random polynomial in one generator and its adjoint: every word of length
/// `0..=degree` with a coefficient uniform on the unit disc.
pub fn random_element<R: Rng>(rng: &mut R, factor: usize, degree: usize) -> Element {
    let mut words = vec![Word::unit()];
    words.extend(Word::all_up_to(&[factor], degree));
    Element::new(words.into_iter().map(|w| (unit_disc(rng), w)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorCheckParams {
    pub degree: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Commutators `[u, v]` (Frobenius) for words `u`, `v` of degree ≤ d in
/// distinct factors, and factorization defects `|φ(a₁⋯aₙ) − Πφ(aᵢ)|` for
/// random elements `aᵢ` in factor `i`.
pub fn tensor_independence_check(s: &State, family: &Family, p: TensorCheckParams) -> Result<CheckReport, NcError> {
    let n = family.len();
    let mut report = CheckReport::new("tensor", p.tol)
        .budget("degree", p.degree)
        .budget("samples", p.samples)
        .budget("factors", n);

    let words: Vec<Vec<(Word, ComplexMatrix)>> = (0..n)
        .map(|i| {
            Word::all_up_to(&[i], p.degree)
                .into_iter()
                .map(|w| Ok((w.clone(), family.word_matrix(&w)?)))
                .collect::<Result<_, NcError>>()
        })
        .collect::<Result<_, NcError>>()?;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for a in 0..words[i].len() {
                for b in 0..words[j].len() {
                    pairs.push((i, a, j, b));
                }
            }
        }
    }
    let commutators = pairs
        .par_iter()
        .map(|&(i, a, j, b)| {
            let (u, um) = &words[i][a];
            let (v, vm) = &words[j][b];
            let r = um.commutator_norm(vm)?;
            let wit = Element::new(vec![
                (Complex64::new(1.0, 0.0), u.concat(v)),
                (Complex64::new(-1.0, 0.0), v.concat(u)),
            ]);
            Ok((r, format!("{{{wit}}}")))
        })
        .collect::<Result<Vec<_>, NcError>>()?;
    report.absorb("commutator", commutators);

    let factorization = (0..p.samples)
        .into_par_iter()
        .map(|k| {
            let mut g = rng(derive_seed(p.seed, k as u64));
            let els: Vec<Element> = (0..n).map(|i| random_element(&mut g, i, p.degree)).collect();
            let joint = family.expect_product(s, &els)?;
            let mut prod = Complex64::new(1.0, 0.0);
            for el in &els {
                prod *= family.expect(s, el)?;
            }
            Ok(((joint - prod).norm(), format_product(&els)))
        })
        .collect::<Result<Vec<_>, NcError>>()?;
    report.absorb("factorization", factorization);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeCheckParams {
    /// Longest alternating pattern `i₁ ≠ i₂ ≠ ⋯ ≠ i_m`.
    pub max_len: usize,
    pub degree: usize,
    /// Random draws per pattern.
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Above this many patterns a seeded subset is drawn instead.
    pub pattern_cap: usize,
}

fn alternating_patterns(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _ in 1..max_len {
        let mut next = Vec::new();
        for p in &layer {
            for i in 0..n {
                if Some(&i) != p.last() {
                    let mut q = p.clone();
                    q.push(i);
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn pattern_count(n: usize, max_len: usize) -> usize {
    (2..=max_len)
        .map(|k| n.saturating_mul((n.saturating_sub(1)).saturating_pow(k as u32 - 1)))
        .fold(0usize, usize::saturating_add)
}

fn random_pattern<R: Rng>(g: &mut R, n: usize, max_len: usize) -> Vec<usize> {
    let len = g.gen_range(2..=max_len);
    let mut p = vec![g.gen_range(0..n)];
    while p.len() < len {
        let step = g.gen_range(1..n);
        p.push((p[p.len() - 1] + step) % n);
    }
    p
}

/// `|φ(å₁ ⋯ å_m)|` for centered random elements `åⱼ` in factor `iⱼ` over
/// alternating patterns of length `2..=max_len`.
pub fn free_independence_check(s: &State, family: &Family, p: FreeCheckParams) -> Result<CheckReport, NcError> {
    let n = family.len();
    let mut report = CheckReport::new("free", p.tol)
        .budget("max_len", p.max_len)
        .budget("degree", p.degree)
        .budget("samples", p.samples)
        .budget("factors", n);
    if n < 2 || p.max_len < 2 {
        report.absorb("alternating", Vec::new());
        return Ok(report);
    }
    let patterns = if pattern_count(n, p.max_len) <= p.pattern_cap {
        alternating_patterns(n, p.max_len)
    } else {
        let mut g = rng(derive_seed(p.seed, u64::MAX));
        (0..p.pattern_cap).map(|_| random_pattern(&mut g, n, p.max_len)).collect()
    };
    report.budgets.insert("patterns".into(), patterns.len() as u64);
    let tasks = patterns.len() * p.samples;
    let results = (0..tasks)
        .into_par_iter()
        .map(|t| {
            let pattern = &patterns[t / p.samples];
            let mut g = rng(derive_seed(p.seed, t as u64));
            let els = pattern
                .iter()
                .map(|&i| center(&random_element(&mut g, i, p.degree), s, family))
                .collect::<Result<Vec<_>, NcError>>()?;
            Ok((family.expect_product(s, &els)?.norm(), format_product(&els)))
        })
        .collect::<Result<Vec<_>, NcError>>()?;
    report.absorb("alternating", results);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceCheckParams {
    pub degree: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Pairs whose products exceed this alternation length are redrawn.
    pub max_alt: Option<usize>,
}

const RESAMPLE_LIMIT: usize = 1000;

/// `|φ(w₁w₂) − φ(w₂w₁)|` over word pairs of length `1..=degree`; every
/// pair when there are at most `samples` of them, otherwise `samples`
/// random pairs.
pub fn trace_check(s: &State, family: &Family, p: TraceCheckParams) -> Result<CheckReport, NcError> {
    let factors: Vec<usize> = (0..family.len()).collect();
    let words = Word::all_up_to(&factors, p.degree);
    let mut report = CheckReport::new("trace", p.tol)
        .budget("degree", p.degree)
        .budget("samples", p.samples);
    if let Some(m) = p.max_alt {
        report.budgets.insert("max_alt".into(), m as u64);
    }
    let admissible = |a: &Word, b: &Word| {
        p.max_alt
            .is_none_or(|m| a.concat(b).alternation_length() <= m && b.concat(a).alternation_length() <= m)
    };
    let pairs: Vec<(usize, usize)> = if words.len() * words.len() <= p.samples {
        (0..words.len())
            .flat_map(|a| (0..words.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| admissible(&words[a], &words[b]))
            .collect()
    } else {
        (0..p.samples)
            .filter_map(|k| {
                let mut g = rng(derive_seed(p.seed, k as u64));
                (0..RESAMPLE_LIMIT).find_map(|_| {
                    let a = g.gen_range(0..words.len());
                    let b = g.gen_range(0..words.len());
                    admissible(&words[a], &words[b]).then_some((a, b))
                })
            })
            .collect()
    };
    let results = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (u, v) = (&words[a], &words[b]);
            let r = (family.moment(s, &u.concat(v))? - family.moment(s, &v.concat(u))?).norm();
            Ok((r, format_product(&[Element::word(u.clone()), Element::word(v.clone())])))
        })
        .collect::<Result<Vec<_>, NcError>>()?;
    report.absorb("cyclic", results);
    Ok(report)
}

/// Faithfulness of a state on the span of words up to a degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaithfulnessReport {
    pub report: CheckReport,
    pub faithful_on_span: bool,
    /// Rank of the Hilbert–Schmidt Gram matrix: dimension of the span.
    pub span_dim: usize,
    /// Rank of the GNS Gram matrix `φ(u*v)`.
    pub gram_rank: usize,
}

/// Compares the dimension of the span of all words of length `≤ degree`
/// (unit included) with the rank of their GNS Gram matrix. Equal ranks mean
/// no nonzero element of the span has `φ(x*x) = 0`.
pub fn faithfulness_check(s: &State, family: &Family, degree: usize) -> Result<FaithfulnessReport, NcError> {
    let factors: Vec<usize> = (0..family.len()).collect();
    let mut words = vec![Word::unit()];
    words.extend(Word::all_up_to(&factors, degree));
    if words.len() > FAITHFUL_WORD_CAP {
        return Err(NcError::WordOverflow {
            count: words.len(),
            limit: FAITHFUL_WORD_CAP,
        });
    }
    if s.dim() != family.dim() {
        return Err(NcError::StateDimension {
            state: s.dim(),
            dim: family.dim(),
        });
    }
    let mats: Vec<ComplexMatrix> = words.iter().map(|w| family.word_matrix(w)).collect::<Result<_, _>>()?;
    let roots: Vec<Vec<Complex64>> = match s {
        State::Vector(xi) => vec![xi.clone()],
        State::Density(rho) => {
            let r = psd_sqrt(rho, 1e-12)?;
            (0..r.cols()).map(|j| r.col(j)).collect()
        }
    };
    let images: Vec<Vec<Vec<Complex64>>> = mats
        .iter()
        .map(|m| roots.iter().map(|x| m.mul_vec(x)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let k = words.len();
    let mut hs = ComplexMatrix::zeros(k, k);
    let mut gns = ComplexMatrix::zeros(k, k);
    for u in 0..k {
        for v in 0..k {
            hs.set(u, v, inner(mats[v].as_slice(), mats[u].as_slice()));
            let g: Complex64 = images[v].iter().zip(&images[u]).map(|(a, b)| inner(a, b)).sum();
            gns.set(u, v, g);
        }
    }
    let span_dim = psd_rank(&hs, GRAM_RANK_TOL)?;
    let gram_rank = psd_rank(&gns, GRAM_RANK_TOL)?;
    let faithful = span_dim == gram_rank;

    let mut report = CheckReport::new("faithful", 0.0).budget("degree", degree).budget("words", k);
    let gap = span_dim.abs_diff(gram_rank) as f64;
    let witness = if faithful {
        String::new()
    } else {
        let x = kernel_witness(&words, &hs, &gns)?;
        format_product(&[x.adjoint(), x])
    };
    report.absorb("rank_gap", vec![(gap, witness)]);
    if faithful {
        report.worst_witness = None;
    }
    Ok(FaithfulnessReport {
        report,
        faithful_on_span: faithful,
        span_dim,
        gram_rank,
    })
}

/// Element of the GNS kernel with the largest Hilbert–Schmidt norm.
fn kernel_witness(words: &[Word], hs: &ComplexMatrix, gns: &ComplexMatrix) -> Result<Element, NcError> {
    let eig = hermitian_eigen(gns)?;
    let max = eig.values.iter().copied().fold(0.0, f64::max);
    let kernel: Vec<usize> = (0..eig.values.len())
        .filter(|&j| eig.values[j] <= GRAM_RANK_TOL * max)
        .collect();
    let basis = eig.vectors.select(&(0..words.len()).collect::<Vec<_>>(), &kernel);
    let restricted = basis.adjoint_mul(&hs.mul(&basis)?)?;
    let top = hermitian_eigen(&restricted)?;
    let y = top.vectors.col(kernel.len() - 1);
    let c = basis.mul_vec(&y)?;
    Ok(Element::new(
        c.iter()
            .zip(words)
            .filter(|(z, _)| z.norm() > 1e-12)
            .map(|(z, w)| (*z, w.clone()))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncprob::make_tensor_independent;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn shift(n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m.set(i + 1, i, r(1.0));
        }
        m
    }

    fn tparams() -> TensorCheckParams {
        TensorCheckParams {
            degree: 2,
            samples: 100,
            seed: 7,
            tol: 1e-10,
        }
    }

    fn fparams(samples: usize) -> FreeCheckParams {
        FreeCheckParams {
            max_len: 4,
            degree: 3,
            samples,
            seed: 11,
            tol: 1e-9,
            pattern_cap: 512,
        }
    }

    #[test]
    fn center_examples() {
        let fam = Family::new(vec![ComplexMatrix::scalar(r(0.5))]).unwrap();
        let s = State::basis(1, 0);
        let one = center(&Element::unit(), &s, &fam).unwrap().simplified();
        assert_eq!(one, Element::zero());
        let t = center(&Element::word(Word::letter(0, false)), &s, &fam).unwrap();
        assert_eq!(t.terms[1], (r(-0.5), Word::unit()));
        let again = center(&t, &s, &fam).unwrap().simplified();
        assert_eq!(again, t.simplified());
        assert!(fam.expect(&s, &t).unwrap().norm() < 1e-16);
    }

    #[test]
    fn tensor_identity_pair_passes() {
        let fam = Family::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)]).unwrap();
        let rep = tensor_independence_check(&State::basis(2, 1), &fam, tparams()).unwrap();
        assert!(rep.pass);
        assert!(rep.max_residual < 1e-14);
    }

    #[test]
    fn tensor_model_passes() {
        let a = ComplexMatrix::from_rows(&[vec![r(0.1), Complex64::new(0.0, 0.4)], vec![r(0.3), r(-0.2)]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.7, 0.1]]).unwrap();
        let (g, s) = make_tensor_independent(&[(a, State::basis(2, 0)), (b, State::basis(2, 0))]).unwrap();
        let rep = tensor_independence_check(&s, &Family::new(g).unwrap(), tparams()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.parts["factorization"] <= 1e-12);
    }

    #[test]
    fn same_shift_twice_fails_factorization() {
        let s3 = shift(3);
        let fam = Family::new(vec![s3.clone(), s3]).unwrap();
        let rep = tensor_independence_check(&State::basis(3, 0), &fam, tparams()).unwrap();
        assert!(!rep.pass);
        assert!(rep.parts["factorization"] >= 0.1);
        // the residual reproduces from the witness
        let w = rep.worst_witness.unwrap();
        assert!(w.starts_with('{'));
    }

    #[test]
    fn single_factor_is_vacuously_free() {
        let fam = Family::new(vec![shift(2)]).unwrap();
        let rep = free_independence_check(&State::basis(2, 0), &fam, fparams(10)).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.evaluated, 0);
    }

    #[test]
    fn copies_of_one_generator_are_not_free() {
        let t = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, -0.5]]).unwrap();
        let fam = Family::new(vec![t.clone(), t]).unwrap();
        let rep = free_independence_check(&State::tracial(2), &fam, fparams(20)).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_residual >= 0.1);
        let els = crate::ncprob::parse_product(rep.worst_witness.as_ref().unwrap()).unwrap();
        let again = fam.expect_product(&State::tracial(2), &els).unwrap().norm();
        assert!((again - rep.max_residual).abs() <= 1e-12 * rep.max_residual.max(1.0));
    }

    #[test]
    fn free_check_is_deterministic() {
        let t = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, -0.5]]).unwrap();
        let fam = Family::new(vec![t.clone(), t.adjoint()]).unwrap();
        let a = free_independence_check(&State::tracial(2), &fam, fparams(5)).unwrap();
        let b = free_independence_check(&State::tracial(2), &fam, fparams(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pattern_enumeration() {
        assert_eq!(alternating_patterns(2, 4).len(), 6);
        assert_eq!(pattern_count(2, 4), 6);
        assert_eq!(alternating_patterns(3, 4).len(), pattern_count(3, 4));
        assert_eq!(pattern_count(3, 4), 6 + 12 + 24);
        let mut g = rng(1);
        for _ in 0..50 {
            let p = random_pattern(&mut g, 3, 4);
            assert!(p.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn trace_commuting_passes() {
        let a = ComplexMatrix::diag(&[r(0.5), Complex64::new(0.0, 0.3)]);
        let b = ComplexMatrix::diag(&[r(-0.1), r(0.9)]);
        let fam = Family::new(vec![a, b]).unwrap();
        let p = TraceCheckParams {
            degree: 3,
            samples: 100,
            seed: 3,
            tol: 1e-12,
            max_alt: None,
        };
        let rep = trace_check(&State::basis(2, 0), &fam, p).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.evaluated, 100);
    }

    #[test]
    fn trace_fails_on_nilpotent() {
        let n = shift(2);
        let fam = Family::new(vec![n.clone(), n]).unwrap();
        let p = TraceCheckParams {
            degree: 1,
            samples: 100,
            seed: 3,
            tol: 1e-9,
            max_alt: None,
        };
        let rep = trace_check(&State::basis(2, 0), &fam, p).unwrap();
        assert!(!rep.pass);
        assert!((rep.max_residual - 1.0).abs() < 1e-15);
        assert_eq!(rep.evaluated, 16);
    }

    #[test]
    fn trace_alternation_budget_filters_pairs() {
        let fam = Family::new(vec![shift(2), shift(2)]).unwrap();
        let p = TraceCheckParams {
            degree: 1,
            samples: 100,
            seed: 3,
            tol: 1e-9,
            max_alt: Some(1),
        };
        let rep = trace_check(&State::basis(2, 0), &fam, p).unwrap();
        assert_eq!(rep.evaluated, 8);
    }

    #[test]
    fn trace_state_is_faithful() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.5], &[0.2, 0.0, 0.0]]).unwrap();
        let fam = Family::new(vec![t]).unwrap();
        let rep = faithfulness_check(&State::tracial(3), &fam, 2).unwrap();
        assert!(rep.faithful_on_span);
        assert!(rep.report.pass);
    }

    #[test]
    fn vector_state_on_diag_is_not_faithful() {
        let fam = Family::new(vec![ComplexMatrix::diag(&[r(0.5), r(0.25)])]).unwrap();
        let s = State::basis(2, 0);
        let rep = faithfulness_check(&s, &fam, 1).unwrap();
        assert!(!rep.faithful_on_span);
        assert_eq!((rep.span_dim, rep.gram_rank), (2, 1));
        let x = crate::ncprob::parse_product(rep.report.worst_witness.as_ref().unwrap()).unwrap();
        assert!(fam.expect_product(&s, &x).unwrap().norm() < 1e-12);
        let xm = fam.element_matrix(&x[1]).unwrap();
        assert!(xm.fro_norm() > 0.1);
        for d in 2..=4 {
            assert!(!faithfulness_check(&s, &fam, d).unwrap().faithful_on_span);
        }
    }

    #[test]
    fn faithfulness_word_guard() {
        let fam = Family::new(vec![ComplexMatrix::identity(1); 2]).unwrap();
        assert!(matches!(
            faithfulness_check(&State::basis(1, 0), &fam, 6),
            Err(NcError::WordOverflow { .. })
        ));
    }
}
