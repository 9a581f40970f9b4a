use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::operator::{ComplexMatrix, CscMatrix, OperatorError};

use super::pointed::PointedSpace;
use super::FreeError;

/// Default cap on the Fock dimension.
pub const DEFAULT_FOCK_CAP: usize = 5000;

/// Basis label: `((i₁, m₁), …, (i_k, m_k))` with `iⱼ ≠ iⱼ₊₁` and `mⱼ` an
/// index into the complement basis of factor `iⱼ`. The empty label is the
/// vacuum.
pub type Label = Vec<(usize, usize)>;

/// `1 + Σ_{k ≤ L} Σ_{alternating i₁…i_k} Π cᵢⱼ` for complement dimensions
/// `c`.
pub fn fock_dimension(complement_dims: &[usize], max_len: usize) -> u128 {
    let c: Vec<u128> = complement_dims.iter().map(|&x| x as u128).collect();
    let mut ending: Vec<u128> = c.clone();
    let mut total: u128 = 1;
    for k in 1..=max_len {
        if k > 1 {
            let sum: u128 = ending.iter().fold(0u128, |a, &b| a.saturating_add(b));
            ending = c
                .iter()
                .zip(&ending)
                .map(|(&ci, &ei)| ci.saturating_mul(sum - ei))
                .collect();
        }
        total = ending.iter().fold(total, |a, &b| a.saturating_add(b));
    }
    total
}

/// Orthonormal basis of the truncated reduced free product.
#[derive(Clone, Debug)]
pub struct FockBasis {
    factors: Vec<PointedSpace>,
    max_len: usize,
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

impl FockBasis {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn factors(&self) -> &[PointedSpace] {
        &self.factors
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, label: &[(usize, usize)]) -> Option<usize> {
        self.index.get(label).copied()
    }
}

/// Builds the basis ordered by length, then lexicographically on
/// `(factor, complement index)`. Fails when the dimension would exceed
/// `cap`.
pub fn build_fock(factors: &[PointedSpace], max_len: usize, cap: usize) -> Result<FockBasis, FreeError> {
    if factors.is_empty() {
        return Err(FreeError::NoFactors);
    }
    if max_len < 1 {
        return Err(FreeError::TruncationTooSmall);
    }
    let cdims: Vec<usize> = factors.iter().map(PointedSpace::complement_dim).collect();
    let dim = fock_dimension(&cdims, max_len);
    if dim > cap as u128 {
        return Err(FreeError::DimensionCap { dim, cap });
    }
    let letters: Vec<(usize, usize)> = cdims
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| (0..c).map(move |m| (i, m)))
        .collect();
    let mut labels: Vec<Label> = vec![Vec::new()];
    let mut layer: Vec<Label> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last().is_none_or(|&(f, _)| f != l.0) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        labels.extend(next.iter().cloned());
        layer = next;
    }
    let index = labels.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect();
    Ok(FockBasis {
        factors: factors.to_vec(),
        max_len,
        labels,
        index,
    })
}

/// Left action `λᵢ(a)` of an operator on factor `i`, as a sparse matrix.
pub fn left_representation_sparse(i: usize, a: &ComplexMatrix, fb: &FockBasis) -> Result<CscMatrix, FreeError> {
    let p = fb.factors.get(i).ok_or(FreeError::UnknownFactor {
        factor: i,
        count: fb.factors.len(),
    })?;
    if a.shape() != (p.dim(), p.dim()) {
        return Err(OperatorError::Shape {
            op: "left_representation",
            left: a.shape(),
            right: (p.dim(), p.dim()),
        }
        .into());
    }
    let b = p.basis_matrix();
    // matrix of `a` in the basis (ξ, complement): index 0 is ξ, m + 1 is
    // complement vector m
    let local = b.adjoint_mul(&a.mul(&b)?)?;
    let k = p.dim();
    let columns: Vec<Vec<(usize, Complex64)>> = fb
        .labels
        .par_iter()
        .map(|w| {
            let mut out = Vec::with_capacity(k);
            let starts_here = w.first().is_some_and(|&(f, _)| f == i);
            let (input, rest): (usize, &[(usize, usize)]) = if starts_here { (w[0].1 + 1, &w[1..]) } else { (0, &w[..]) };
            for q in 0..k {
                let z = local.get(q, input);
                if z == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let target = if q == 0 {
                    fb.index.get(rest)
                } else if rest.len() < fb.max_len {
                    let mut v = Vec::with_capacity(rest.len() + 1);
                    v.push((i, q - 1));
                    v.extend_from_slice(rest);
                    fb.index.get(&v)
                } else {
                    None
                };
                if let Some(&row) = target {
                    out.push((row, z));
                }
            }
            out
        })
        .collect();
    Ok(CscMatrix::from_column_entries(fb.dim(), columns))
}

/// Dense form of [`left_representation_sparse`].
pub fn left_representation(i: usize, a: &ComplexMatrix, fb: &FockBasis) -> Result<ComplexMatrix, FreeError> {
    Ok(left_representation_sparse(i, a, fb)?.to_dense())
}
