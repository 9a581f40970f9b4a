use crate::operator::{orthonormal_extend, Complex64, ComplexMatrix, Embedding};

use super::DilationError;

/// Relative rank tolerance for span growth.
pub const RANK_TOL: f64 = 1e-10;

/// Smallest subspace containing the range of `e` and invariant under every
/// `Uᵢ` and `Uᵢ*`, found by repeatedly applying the unitaries to the newest
/// basis vectors and orthonormalising until nothing new appears.
pub fn minimal_reducing_subspace(us: &[ComplexMatrix], e: &Embedding, tol: f64) -> Result<Embedding, DilationError> {
    for (index, u) in us.iter().enumerate() {
        let residual = u.unitarity_residual()?;
        if residual > tol {
            return Err(DilationError::NotUnitary { index, residual });
        }
    }
    let big = e.big_dim();
    let seed: Vec<Vec<Complex64>> = (0..e.small_dim()).map(|j| e.isometry().col(j)).collect();
    let mut basis = orthonormal_extend(&[], &seed, RANK_TOL);
    let mut frontier = 0;
    while frontier < basis.len() && basis.len() < big {
        let fresh = ComplexMatrix::from_columns(big, &basis[frontier..]);
        let mut candidates = Vec::new();
        for u in us {
            let fwd = u.mul(&fresh)?;
            let bwd = u.adjoint_mul(&fresh)?;
            for j in 0..fresh.cols() {
                candidates.push(fwd.col(j));
                candidates.push(bwd.col(j));
            }
        }
        frontier = basis.len();
        basis = orthonormal_extend(&basis, &candidates, RANK_TOL);
    }
    Ok(Embedding::new(ComplexMatrix::from_columns(big, &basis), tol.max(1e-10))?)
}

/// `max_i max(‖(I − Q) Uᵢ Q‖, ‖(I − Q) Uᵢ* Q‖)` for `Q` the projection onto
/// the range of `e`.
pub fn reducing_residual(us: &[ComplexMatrix], e: &Embedding) -> Result<f64, DilationError> {
    let q = e.projection();
    let comp = ComplexMatrix::identity(e.big_dim()).sub(&q)?;
    let mut worst: f64 = 0.0;
    for u in us {
        worst = worst.max(comp.mul(&u.mul(&q)?)?.fro_norm());
        worst = worst.max(comp.mul(&u.adjoint_mul(&q)?)?.fro_norm());
    }
    Ok(worst)
}
