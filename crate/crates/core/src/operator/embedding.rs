use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE};
use super::OperatorError;

/// An isometry `C^small → C^big` identifying a small space inside a large one.
///
/// Compression through the embedding, `E* A E`, is the concrete form of
/// `P_H A |_H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    isometry: ComplexMatrix,
}

impl Embedding {
    /// Wraps `isometry` after checking `‖E*E − I‖_F ≤ tol`.
    pub fn new(isometry: ComplexMatrix, tol: f64) -> Result<Self, OperatorError> {
        let residual = isometry.adjoint().mul(&isometry)?.distance_to_identity()?;
        if residual > tol {
            return Err(OperatorError::NotIsometry { residual });
        }
        Ok(Self { isometry })
    }

    /// Coordinate inclusion: the `j`-th small basis vector goes to
    /// `e_{indices[j]}` of the big space. Exact by construction.
    pub fn coordinate(big_dim: usize, indices: &[usize]) -> Result<Self, OperatorError> {
        let mut seen = vec![false; big_dim];
        let mut iso = ComplexMatrix::zeros(big_dim, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if i >= big_dim || seen[i] {
                return Err(OperatorError::BadCoordinates { index: i, big_dim });
            }
            seen[i] = true;
            iso.set(i, j, ONE);
        }
        Ok(Self { isometry: iso })
    }

    /// Inclusion onto the first `small_dim` coordinates.
    pub fn leading(big_dim: usize, small_dim: usize) -> Result<Self, OperatorError> {
        Self::coordinate(big_dim, &(0..small_dim).collect::<Vec<_>>())
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            isometry: ComplexMatrix::identity(dim),
        }
    }

    pub fn big_dim(&self) -> usize {
        self.isometry.rows()
    }

    pub fn small_dim(&self) -> usize {
        self.isometry.cols()
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// `E* A E`.
    pub fn compress(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, OperatorError> {
        if a.shape() != (self.big_dim(), self.big_dim()) {
            return Err(OperatorError::Shape {
                op: "compress",
                left: a.shape(),
                right: self.isometry.shape(),
            });
        }
        self.isometry.adjoint().mul(&a.mul(&self.isometry)?)
    }

    /// Image `E v` of a small-space vector.
    pub fn lift_vector(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        self.isometry.mul_vec(v)
    }

    /// `E A E*`, the big-space operator supported on the range.
    pub fn lift_operator(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, OperatorError> {
        self.isometry.mul(&a.mul(&self.isometry.adjoint())?)
    }

    /// Orthogonal projection `E E*` onto the range.
    pub fn projection(&self) -> ComplexMatrix {
        self.isometry
            .mul(&self.isometry.adjoint())
            .expect("isometry shapes are compatible")
    }

    /// `self ∘ inner`: first embed by `inner`, then by `self`.
    pub fn compose(&self, inner: &Embedding) -> Result<Self, OperatorError> {
        Ok(Self {
            isometry: self.isometry.mul(&inner.isometry)?,
        })
    }
}

/// `compress(a, e)`.
pub fn compress(a: &ComplexMatrix, e: &Embedding) -> Result<ComplexMatrix, OperatorError> {
    e.compress(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_identity_and_corner() {
        let e = Embedding::leading(2, 1).unwrap();
        assert_eq!(e.compress(&ComplexMatrix::identity(2)).unwrap(), ComplexMatrix::identity(1));
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(
            compress(&a, &e).unwrap(),
            ComplexMatrix::scalar(Complex64::new(1.0, 0.0))
        );
    }

    #[test]
    fn compress_commutes_with_adjoint() {
        let a = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.0)],
            vec![Complex64::new(3.0, -1.0), Complex64::new(4.0, 0.5), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.2, 0.0), Complex64::new(0.0, -0.3), Complex64::new(1.0, 1.0)],
        ])
        .unwrap();
        let e = Embedding::coordinate(3, &[2, 0]).unwrap();
        let lhs = e.compress(&a.adjoint()).unwrap();
        let rhs = e.compress(&a).unwrap().adjoint();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rejects_non_isometry_and_bad_coords() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0], &[0.0]]).unwrap();
        assert!(matches!(Embedding::new(m, 1e-9), Err(OperatorError::NotIsometry { .. })));
        assert!(Embedding::coordinate(2, &[0, 0]).is_err());
        assert!(Embedding::coordinate(2, &[2]).is_err());
    }

    #[test]
    fn compress_shape_mismatch() {
        let e = Embedding::leading(3, 1).unwrap();
        assert!(e.compress(&ComplexMatrix::identity(2)).is_err());
    }
}
