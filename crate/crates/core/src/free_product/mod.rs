//! Truncated reduced free products of pointed Hilbert spaces and the free
//! unitary dilation of a tuple of contractions.
//!
//! The Fock space keeps the vacuum and alternating words of length at most
//! `L`. Any product of at most `L` alternating runs applied to the vacuum
//! is computed exactly; beyond that, components are projected away.

mod fock;
mod pointed;
mod scenario;

use thiserror::Error;

use crate::dilation::DilationError;
use crate::ncprob::NcError;
use crate::operator::OperatorError;

pub use fock::{build_fock, fock_dimension, left_representation, left_representation_sparse, FockBasis, Label, DEFAULT_FOCK_CAP};
pub use pointed::PointedSpace;
pub use scenario::{dilated_state, free_unitary_dilation, FreeDilationScenario, FreeParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FreeError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Dilation(#[from] DilationError),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error("Fock space would have dimension {dim}, above the cap {cap}")]
    DimensionCap { dim: u128, cap: usize },
    #[error("truncation length must be at least 1")]
    TruncationTooSmall,
    #[error("no factors supplied")]
    NoFactors,
    #[error("factor {factor} does not exist ({count} factors)")]
    UnknownFactor { factor: usize, count: usize },
    #[error("factor {index}: matrix is {}x{} but its state has dimension {state_dim}", shape.0, shape.1)]
    FactorShape { index: usize, shape: (usize, usize), state_dim: usize },
}
