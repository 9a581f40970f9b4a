use crate::operator::{ComplexMatrix, Embedding};

use super::schaffer::finite_unitary_dilation;
use super::{DilationError, DilationResult};

/// Largest `max(‖AB − BA‖, ‖A*B − BA*‖)` over ordered pairs `i ≠ j`, with
/// the offending pair.
pub fn double_commutation_residual(ops: &[ComplexMatrix]) -> Result<(f64, Option<(usize, usize)>), DilationError> {
    let mut worst = 0.0;
    let mut pair = None;
    for i in 0..ops.len() {
        let adj = ops[i].adjoint();
        for j in 0..ops.len() {
            if i == j {
                continue;
            }
            let r = ops[i]
                .commutator_norm(&ops[j])?
                .max(adj.commutator_norm(&ops[j])?);
            if pair.is_none() || r > worst {
                worst = r;
                pair = Some((i, j));
            }
        }
    }
    Ok((worst, pair))
}

/// Iterated dilation of a doubly commuting tuple.
///
/// Step `j` replaces the current `T_j` by its degree-`N` cyclic dilation and
/// every other factor by `I_{N+1} ⊗ T_i`. After `n` steps all factors are
/// unitary on `C^{(N+1)^n} ⊗ C^d` and the original space sits on the first
/// `d` coordinates.
pub fn doubly_commuting_dilation(ts: &[ComplexMatrix], n_degree: usize, tol: f64) -> Result<DilationResult, DilationError> {
    if ts.is_empty() {
        return Err(DilationError::Empty);
    }
    if n_degree < 1 {
        return Err(DilationError::DegreeTooSmall(n_degree));
    }
    let d = ts[0].rows();
    for (index, t) in ts.iter().enumerate() {
        if t.shape() != (d, d) {
            return Err(DilationError::DimensionMismatch { index, shape: t.shape() });
        }
    }
    for i in 0..ts.len() {
        let adj = ts[i].adjoint();
        for j in 0..ts.len() {
            if i == j {
                continue;
            }
            let residual = ts[i].commutator_norm(&ts[j])?.max(adj.commutator_norm(&ts[j])?);
            if residual > tol {
                return Err(DilationError::NotDoublyCommuting { i, j, residual });
            }
        }
    }

    let mut current: Vec<ComplexMatrix> = ts.to_vec();
    let mut dim = d;
    let pad = ComplexMatrix::identity(n_degree + 1);
    for j in 0..ts.len() {
        let step = finite_unitary_dilation(&current[j], n_degree, tol)?;
        current = current
            .iter()
            .enumerate()
            .map(|(i, t)| if i == j { step.unitaries[0].clone() } else { pad.kron(t) })
            .collect();
        dim *= n_degree + 1;
    }
    Ok(DilationResult {
        unitaries: current,
        embedding: Embedding::leading(dim, d)?,
        degree: n_degree,
        ambient_dim: dim,
    })
}
