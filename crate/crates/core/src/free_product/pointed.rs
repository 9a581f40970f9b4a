use num_complex::Complex64;

use crate::operator::{complete_basis, inner, vec_norm, ComplexMatrix, OperatorError, ZERO};

/// A Hilbert space `C^dim` with a distinguished unit vector `ξ` and an
/// orthonormal basis of `ξ^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointedSpace {
    base: Vec<Complex64>,
    complement: Vec<Vec<Complex64>>,
}

impl PointedSpace {
    /// Completes `ξ` with standard basis vectors by Gram–Schmidt.
    pub fn from_vector(xi: Vec<Complex64>, tol: f64) -> Result<Self, OperatorError> {
        let norm = vec_norm(&xi);
        if (norm - 1.0).abs() > tol {
            return Err(OperatorError::NotUnitVector { norm });
        }
        let dim = xi.len();
        let mut basis = complete_basis(&[xi], dim);
        let complement = basis.split_off(1);
        Ok(Self {
            base: basis.pop().expect("seed vector"),
            complement,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[Complex64] {
        &self.base
    }

    pub fn complement(&self) -> &[Vec<Complex64>] {
        &self.complement
    }

    pub fn complement_dim(&self) -> usize {
        self.complement.len()
    }

    /// Unitary whose columns are `ξ` followed by the complement basis.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        let mut cols = vec![self.base.clone()];
        cols.extend(self.complement.iter().cloned());
        ComplexMatrix::from_columns(self.dim(), &cols)
    }

    /// The same pointed space inside `C^big_dim` through the leading
    /// coordinates; the new complement lists the old one first, then the
    /// added standard vectors.
    pub fn extended(&self, big_dim: usize) -> Self {
        assert!(big_dim >= self.dim(), "cannot extend to a smaller space");
        let pad = |v: &[Complex64]| {
            let mut w = v.to_vec();
            w.resize(big_dim, ZERO);
            w
        };
        let mut complement: Vec<Vec<Complex64>> = self.complement.iter().map(|v| pad(v)).collect();
        for k in self.dim()..big_dim {
            let mut e = vec![ZERO; big_dim];
            e[k] = Complex64::new(1.0, 0.0);
            complement.push(e);
        }
        Self {
            base: pad(&self.base),
            complement,
        }
    }

    /// `max |⟨bᵢ, bⱼ⟩ − δᵢⱼ|` over the full basis.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut all = vec![self.base.clone()];
        all.extend(self.complement.iter().cloned());
        let mut worst: f64 = if all.len() == self.dim() { 0.0 } else { 1.0 };
        for i in 0..all.len() {
            for j in 0..all.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(&all[i], &all[j]) - target).norm());
            }
        }
        worst
    }
}
