//! Finite unitary power-dilations.
//!
//! A single contraction `T` on `C^d` is dilated to the cyclic block unitary
//! of degree `N` on `C^{N+1} ⊗ C^d`; compressing `U^k` back to the first
//! block reproduces `T^k` (and `(U*)^k` reproduces `(T*)^k`) for every
//! `0 ≤ k ≤ N`. Doubly commuting tuples are dilated one factor at a time,
//! tensoring the other factors with the identity at each step.

mod doubly;
mod reducing;
mod schaffer;
mod verify;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::operator::{ComplexMatrix, Embedding, OperatorError};

pub use doubly::{double_commutation_residual, doubly_commuting_dilation};
pub use reducing::{minimal_reducing_subspace, reducing_residual, RANK_TOL};
pub use schaffer::finite_unitary_dilation;
pub use verify::{check_budget, verify_power_dilation, DilationView, PowerResidual, WordMode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DilationError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("dilation degree must be at least 1, got {0}")]
    DegreeTooSmall(usize),
    #[error("empty tuple of contractions")]
    Empty,
    #[error("contractions must share one square dimension: factor {index} is {}x{}", shape.0, shape.1)]
    DimensionMismatch { index: usize, shape: (usize, usize) },
    #[error("factors {i} and {j} do not doubly commute (residual {residual:e})")]
    NotDoublyCommuting { i: usize, j: usize, residual: f64 },
    #[error("operator {index} is not unitary (residual {residual:e})")]
    NotUnitary { index: usize, residual: f64 },
    #[error("word {word} rejected: {reason}")]
    OutsideBudget { word: String, reason: String },
    #[error("word refers to factor {factor} but only {count} are available")]
    UnknownFactor { factor: usize, count: usize },
}

/// A word `T_{i₁}(k₁) ⋯ T_{i_m}(k_m)` with `T(k) = T^k` for `k ≥ 0` and
/// `T(k) = (T*)^{-k}` for `k < 0`. Factor ids are zero-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SignedPowerWord {
    pub letters: Vec<(usize, i64)>,
}

impl SignedPowerWord {
    pub fn new(letters: Vec<(usize, i64)>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `Σ |kⱼ|`.
    pub fn total_degree(&self) -> u64 {
        self.letters.iter().map(|&(_, k)| k.unsigned_abs()).sum()
    }

    /// Number of maximal runs of one factor after dropping `k = 0` letters.
    pub fn alternation_length(&self) -> usize {
        let mut last = None;
        let mut runs = 0;
        for &(f, k) in &self.letters {
            if k == 0 {
                continue;
            }
            if last != Some(f) {
                runs += 1;
                last = Some(f);
            }
        }
        runs
    }

    /// Evaluates the word on concrete operators, `T(k)` per letter, left to
    /// right.
    pub fn evaluate(&self, ops: &[ComplexMatrix]) -> Result<ComplexMatrix, DilationError> {
        let dim = ops.first().map(ComplexMatrix::rows).ok_or(DilationError::Empty)?;
        let mut acc = ComplexMatrix::identity(dim);
        for &(f, k) in self.letters.iter().rev() {
            let t = ops.get(f).ok_or(DilationError::UnknownFactor {
                factor: f,
                count: ops.len(),
            })?;
            for _ in 0..k.unsigned_abs() {
                acc = if k >= 0 { t.mul(&acc)? } else { t.adjoint_mul(&acc)? };
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for SignedPowerWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (n, (i, k)) in self.letters.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}^{k}")?;
        }
        Ok(())
    }
}

impl FromStr for SignedPowerWord {
    type Err = String;

    /// Parses `"0^2 1^-1"`; a bare `"1"` means power one and `"e"` or the
    /// empty string is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (f, k) = match tok.split_once('^') {
                Some((f, k)) => (f, k.parse::<i64>().map_err(|e| format!("bad power in {tok:?}: {e}"))?),
                None => (tok, 1),
            };
            let f = f.parse::<usize>().map_err(|e| format!("bad factor in {tok:?}: {e}"))?;
            letters.push((f, k));
        }
        Ok(Self { letters })
    }
}

/// Output of a dilation: unitaries on the ambient space and the embedding
/// of the original space.
#[derive(Clone, Debug)]
pub struct DilationResult {
    pub unitaries: Vec<ComplexMatrix>,
    pub embedding: Embedding,
    /// Exactness budget: power identities hold for `|k| ≤ degree`.
    pub degree: usize,
    pub ambient_dim: usize,
}

impl DilationResult {
    /// Largest `‖U*U − I‖_F`, `‖UU* − I‖_F` over the tuple.
    pub fn unitarity_residual(&self) -> Result<f64, DilationError> {
        let mut worst: f64 = 0.0;
        for u in &self.unitaries {
            worst = worst.max(u.unitarity_residual()?);
        }
        Ok(worst)
    }

    pub fn view(&self) -> DilationView<'_> {
        DilationView {
            unitaries: &self.unitaries,
            embedding: &self.embedding,
            degree: self.degree,
            mode: WordMode::Tensor,
        }
    }
}
