//! Dense complex linear algebra shared by every other module: matrices,
//! states, embeddings, defect operators and compressions.

mod embedding;
mod matrix;
mod sparse;
mod spectral;
mod state;

use thiserror::Error;

pub use embedding::{compress, Embedding};
pub use matrix::{basis_vector, inner, vec_kron, vec_norm, ComplexMatrix, MatrixOp, ONE, ZERO};
pub use sparse::CscMatrix;
pub use spectral::{
    complete_basis, defect_pair, hermitian_eigen, operator_norm, orthonormal_extend, psd_rank, psd_sqrt, DefectPair,
    HermitianEigen, DEFAULT_TOL,
};
pub use state::{evaluate_state, purify, Purification, State};

pub use num_complex::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("shape mismatch in {op}: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} needs a square matrix, got {}x{}", shape.0, shape.1)]
    NotSquare { op: &'static str, shape: (usize, usize) },
    #[error("expected {rows}x{cols} = {} entries, got {len}", rows * cols)]
    EntryCount { rows: usize, cols: usize, len: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("not PSD: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },
    #[error("not a contraction: operator norm {norm}")]
    NotContraction { norm: f64 },
    #[error("not an isometry: ‖E*E − I‖ = {residual:e}")]
    NotIsometry { residual: f64 },
    #[error("coordinate index {index} invalid or repeated for ambient dimension {big_dim}")]
    BadCoordinates { index: usize, big_dim: usize },
    #[error("state vector is not a unit vector: norm {norm}")]
    NotUnitVector { norm: f64 },
    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
}
