use crate::operator::{defect_pair, ComplexMatrix, Embedding, ONE};

use super::{DilationError, DilationResult};

fn put_block(u: &mut ComplexMatrix, d: usize, bi: usize, bj: usize, block: &ComplexMatrix, negate: bool) {
    for i in 0..d {
        for j in 0..d {
            let z = block.get(i, j);
            u.set(bi * d + i, bj * d + j, if negate { -z } else { z });
        }
    }
}

/// Cyclic block unitary of degree `n_degree` dilating the contraction `t`.
///
/// Acting on `C^{N+1} ⊗ C^d` (block index outermost):
///
/// ```text
/// U[0][0] = T     U[0][N] = D_{T*}
/// U[1][0] = D_T   U[1][N] = −T*
/// U[j+1][j] = I   for 1 ≤ j ≤ N − 1
/// ```
///
/// Block 0 carries the original space. A vector leaving block 0 walks
/// through blocks `1..N` before it can return, which makes
/// `P U^k |_H = T^k` exact for `k ≤ N`.
pub fn finite_unitary_dilation(t: &ComplexMatrix, n_degree: usize, tol: f64) -> Result<DilationResult, DilationError> {
    if n_degree < 1 {
        return Err(DilationError::DegreeTooSmall(n_degree));
    }
    let defects = defect_pair(t, tol)?;
    let d = t.rows();
    let n = n_degree;
    let dim = (n + 1) * d;
    let mut u = ComplexMatrix::zeros(dim, dim);
    put_block(&mut u, d, 0, 0, t, false);
    put_block(&mut u, d, 1, 0, &defects.d_t, false);
    put_block(&mut u, d, 0, n, &defects.d_tstar, false);
    put_block(&mut u, d, 1, n, &t.adjoint(), true);
    for j in 1..n {
        for i in 0..d {
            u.set((j + 1) * d + i, j * d + i, ONE);
        }
    }
    Ok(DilationResult {
        unitaries: vec![u],
        embedding: Embedding::leading(dim, d)?,
        degree: n,
        ambient_dim: dim,
    })
}
