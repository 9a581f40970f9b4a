//! Noncommutative probability: formal words and elements, moments under a
//! state, tensor and free independence checks, non-crossing partitions,
//! free cumulants and the free mixed-moment oracle.

mod checks;
mod family;
mod oracle;
mod partitions;
mod tensor_model;
mod word;

use thiserror::Error;

use crate::operator::OperatorError;

pub use checks::{
    center, faithfulness_check, free_independence_check, random_element, tensor_independence_check, trace_check,
    CheckReport, FaithfulnessReport, FreeCheckParams, TensorCheckParams, TraceCheckParams,
};
pub use family::{evaluate_word, Family};
pub use oracle::{free_mixed_moment_oracle, FreeOracle, Marginal, MatrixMarginal, UnitaryMarginal, MAX_ORACLE_LEN};
pub use partitions::{free_cumulants, moments_from_cumulants, noncrossing_partitions, NCPartition, MAX_PARTITION_SIZE};
pub use tensor_model::{make_tensor_independent, TENSOR_DIM_CAP};
pub use word::{format_product, parse_product, Element, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NcError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("no generators supplied")]
    NoGenerators,
    #[error("word refers to factor {factor} but only {count} are available")]
    UnknownFactor { factor: usize, count: usize },
    #[error("generator {index} is {}x{}, expected {dim}x{dim}", shape.0, shape.1)]
    GeneratorShape { index: usize, shape: (usize, usize), dim: usize },
    #[error("state has dimension {state}, generators act on dimension {dim}")]
    StateDimension { state: usize, dim: usize },
    #[error("partition size {k} outside 1..=12")]
    PartitionRange { k: usize },
    #[error("word of length {len} exceeds the oracle limit {limit}")]
    DepthGuard { len: usize, limit: usize },
    #[error("no marginal supplied for factor {0}")]
    MissingMarginal(usize),
    #[error("marginal for factor {factor} is only known for |k| <= {max}, asked for k = {k}")]
    MarginalOutOfRange { factor: usize, k: i64, max: i64 },
    #[error("{count} words exceed the limit {limit}")]
    WordOverflow { count: usize, limit: usize },
    #[error("tensor product dimension {dim} exceeds the limit {limit}")]
    TensorOverflow { dim: usize, limit: usize },
}
