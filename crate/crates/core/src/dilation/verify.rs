use crate::operator::{ComplexMatrix, Embedding};

use super::{DilationError, SignedPowerWord};

/// Which family of words a dilation is certified for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordMode {
    /// One letter per factor in increasing factor order, `|k| ≤ N`.
    Tensor,
    /// Arbitrary factor sequence with `k ≥ 0`, `Σk ≤ N` and at most
    /// `alternation_budget` alternating runs.
    Free { alternation_budget: usize },
}

/// Borrowed view of a dilation: unitaries, embedding and exactness budget.
#[derive(Clone, Copy, Debug)]
pub struct DilationView<'a> {
    pub unitaries: &'a [ComplexMatrix],
    pub embedding: &'a Embedding,
    pub degree: usize,
    pub mode: WordMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerResidual {
    pub word: SignedPowerWord,
    /// `‖E*(∏ U(k))E − ∏ T(k)‖_F`.
    pub residual: f64,
    pub pass: bool,
}

fn reject(word: &SignedPowerWord, reason: String) -> DilationError {
    DilationError::OutsideBudget {
        word: word.to_string(),
        reason,
    }
}

/// Rejects words outside the exactness budget of a degree-`degree`
/// dilation certified in `mode`.
pub fn check_budget(degree: usize, mode: WordMode, word: &SignedPowerWord) -> Result<(), DilationError> {
    let n = degree as u64;
    match mode {
        WordMode::Tensor => {
            let mut last: Option<usize> = None;
            for &(f, k) in &word.letters {
                if last.is_some_and(|l| f <= l) {
                    return Err(reject(word, "tensor words take each factor at most once, in increasing order".into()));
                }
                if k.unsigned_abs() > n {
                    return Err(reject(word, format!("|k| = {} exceeds the dilation degree {n}", k.unsigned_abs())));
                }
                last = Some(f);
            }
        }
        WordMode::Free { alternation_budget } => {
            if word.letters.iter().any(|&(_, k)| k < 0) {
                return Err(reject(word, "free words take nonnegative powers only".into()));
            }
            if word.total_degree() > n {
                return Err(reject(
                    word,
                    format!("total degree {} exceeds the dilation degree {n}", word.total_degree()),
                ));
            }
            if word.alternation_length() > alternation_budget {
                return Err(reject(
                    word,
                    format!(
                        "alternation length {} exceeds the truncation budget {alternation_budget}",
                        word.alternation_length()
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Checks one power-dilation identity `E*(∏ U(k))E = ∏ T(k)`.
///
/// Words outside the view's exactness budget are rejected with an
/// explanation rather than evaluated.
pub fn verify_power_dilation(
    view: &DilationView<'_>,
    ts: &[ComplexMatrix],
    word: &SignedPowerWord,
    tol: f64,
) -> Result<PowerResidual, DilationError> {
    check_budget(view.degree, view.mode, word)?;
    for &(f, _) in &word.letters {
        if f >= view.unitaries.len() || f >= ts.len() {
            return Err(DilationError::UnknownFactor {
                factor: f,
                count: view.unitaries.len().min(ts.len()),
            });
        }
    }
    let mut big = view.embedding.isometry().clone();
    for &(f, k) in word.letters.iter().rev() {
        let u = &view.unitaries[f];
        for _ in 0..k.unsigned_abs() {
            big = if k >= 0 { u.mul(&big)? } else { u.adjoint_mul(&big)? };
        }
    }
    let lhs = view.embedding.isometry().adjoint_mul(&big)?;
    let rhs = if word.is_empty() {
        ComplexMatrix::identity(view.embedding.small_dim())
    } else {
        word.evaluate(ts)?
    };
    let residual = lhs.distance(&rhs)?;
    Ok(PowerResidual {
        word: word.clone(),
        residual,
        pass: residual <= tol,
    })
}
