//! Hermitian spectral routines: eigendecomposition, operator norm, PSD square
//! roots, defect operators and rank-revealing orthonormalisation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{inner, vec_norm, ComplexMatrix, ZERO};
use super::OperatorError;

/// Default contraction tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenpairs of a Hermitian matrix, eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn from_nalgebra(m: &DMatrix<Complex64>) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.set(i, j, m[(i, j)]);
        }
    }
    out
}

/// Eigendecomposition of the Hermitian part `(m + m*)/2`. The caller is
/// responsible for checking that `m` was Hermitian to begin with.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen, OperatorError> {
    m.check_square("hermitian_eigen")?;
    let n = m.rows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = m.add(&m.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&sym));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = from_nalgebra(&eig.eigenvectors);
    let vectors = vecs.select(&(0..n).collect::<Vec<_>>(), &order);
    Ok(HermitianEigen { values, vectors })
}

/// Operator norm, the largest singular value, from the spectrum of `m*m`.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64, OperatorError> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let gram = m.adjoint().mul(m)?;
    let eig = hermitian_eigen(&gram)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<(), OperatorError> {
    let residual = m.hermitian_residual()?;
    if residual > tol * (1.0 + m.max_abs()) {
        return Err(OperatorError::NotHermitian { residual });
    }
    Ok(())
}

/// Applies `f` to the spectrum of a Hermitian matrix.
fn spectral_map(eig: &HermitianEigen, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = eig.values.len();
    let q = &eig.vectors;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let s = f(lambda);
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            let qi = q.get(i, k) * s;
            if qi == ZERO {
                continue;
            }
            for j in 0..n {
                let cur = out.get(i, j);
                out.set(i, j, cur + qi * q.get(j, k).conj());
            }
        }
    }
    out
}

/// Hermitian square root of a PSD matrix. Eigenvalues in `[-tol, tol]` are
/// clamped to zero first; anything below `-tol` is rejected.
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, OperatorError> {
    check_hermitian(m, tol)?;
    let eig = hermitian_eigen(m)?;
    if let Some(&min) = eig.values.first() {
        if min < -tol {
            return Err(OperatorError::NotPsd { eigenvalue: min });
        }
    }
    Ok(spectral_map(&eig, |lambda| if lambda <= tol { 0.0 } else { lambda.sqrt() }))
}

/// Defect operators `D_T = (I − T*T)^{1/2}` and `D_{T*} = (I − TT*)^{1/2}`.
#[derive(Clone, Debug)]
pub struct DefectPair {
    pub d_t: ComplexMatrix,
    pub d_tstar: ComplexMatrix,
}

impl DefectPair {
    /// `‖T·D_T − D_{T*}·T‖_F`.
    pub fn intertwining_residual(&self, t: &ComplexMatrix) -> Result<f64, OperatorError> {
        t.mul(&self.d_t)?.distance(&self.d_tstar.mul(t)?)
    }
}

/// Defect operators of a square contraction `t` (`‖t‖ ≤ 1 + tol`).
pub fn defect_pair(t: &ComplexMatrix, tol: f64) -> Result<DefectPair, OperatorError> {
    t.check_square("defect_pair")?;
    let norm = operator_norm(t)?;
    if norm > 1.0 + tol {
        return Err(OperatorError::NotContraction { norm });
    }
    let n = t.rows();
    let id = ComplexMatrix::identity(n);
    let adj = t.adjoint();
    let d_t = psd_sqrt(&id.sub(&adj.mul(t)?)?, tol)?;
    let d_tstar = psd_sqrt(&id.sub(&t.mul(&adj)?)?, tol)?;
    Ok(DefectPair { d_t, d_tstar })
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass. Vectors whose
/// residual norm falls below `rel_tol` times the largest input norm are
/// dropped. The vectors of `seed` (already orthonormal) are kept in place and
/// the surviving `candidates` are appended in order.
pub fn orthonormal_extend(
    seed: &[Vec<Complex64>],
    candidates: &[Vec<Complex64>],
    rel_tol: f64,
) -> Vec<Vec<Complex64>> {
    let scale = seed
        .iter()
        .chain(candidates)
        .map(|v| vec_norm(v))
        .fold(0.0, f64::max);
    let threshold = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<Complex64>> = seed.to_vec();
    for cand in candidates {
        let mut v = cand.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = vec_norm(&v);
        if n > threshold {
            let inv = 1.0 / n;
            v.iter_mut().for_each(|x| *x *= inv);
            basis.push(v);
        }
    }
    basis
}

/// Orthonormal completion: `seed` followed by standard basis vectors
/// orthogonalised against everything before them, until the space of
/// dimension `dim` is exhausted.
pub fn complete_basis(seed: &[Vec<Complex64>], dim: usize) -> Vec<Vec<Complex64>> {
    let standard: Vec<Vec<Complex64>> = (0..dim).map(|i| super::matrix::basis_vector(dim, i)).collect();
    let mut out = seed.to_vec();
    for e in standard {
        if out.len() == dim {
            break;
        }
        out = orthonormal_extend(&out, std::slice::from_ref(&e), 1e-8);
    }
    out
}

/// Numerical rank of a Hermitian PSD matrix: eigenvalues above
/// `rel_tol · λ_max`.
pub fn psd_rank(m: &ComplexMatrix, rel_tol: f64) -> Result<usize, OperatorError> {
    let eig = hermitian_eigen(m)?;
    let max = eig.values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Ok(0);
    }
    Ok(eig.values.iter().filter(|&&l| l > rel_tol * max).count())
}
