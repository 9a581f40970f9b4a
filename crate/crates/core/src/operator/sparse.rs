use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::OperatorError;

/// Compressed-column operator. Products with a dense vector skip zero
/// input entries, so applying it to the sparsely supported vectors that
/// arise from the Fock vacuum is cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct CscMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CscMatrix {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut col_ptr = Vec::with_capacity(m.cols() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                let z = m.get(i, j);
                if z != ZERO {
                    row_idx.push(i);
                    values.push(z);
                }
            }
            col_ptr.push(values.len());
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Column-compressed form of `m*`.
    pub fn adjoint_of(m: &ComplexMatrix) -> Self {
        let mut col_ptr = Vec::with_capacity(m.rows() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for i in 0..m.rows() {
            for (j, &z) in m.row(i).iter().enumerate() {
                if z != ZERO {
                    row_idx.push(j);
                    values.push(z.conj());
                }
            }
            col_ptr.push(values.len());
        }
        Self {
            rows: m.cols(),
            cols: m.rows(),
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![super::matrix::ONE; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `self · v`; zero entries of `v` cost nothing beyond the scan.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        if v.len() != self.cols {
            return Err(OperatorError::Shape {
                op: "multiply",
                left: (self.rows, self.cols),
                right: (v.len(), 1),
            });
        }
        let mut out = vec![ZERO; self.rows];
        for (j, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                out[self.row_idx[p]] += self.values[p] * x;
            }
        }
        Ok(out)
    }

    /// Sparse product `self · other`.
    pub fn mul(&self, other: &CscMatrix) -> Result<CscMatrix, OperatorError> {
        if self.cols != other.rows {
            return Err(OperatorError::Shape {
                op: "multiply",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut acc = vec![ZERO; self.rows];
        let mut touched = vec![false; self.rows];
        let mut list: Vec<usize> = Vec::new();
        let mut col_ptr = Vec::with_capacity(other.cols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..other.cols {
            for p in other.col_ptr[j]..other.col_ptr[j + 1] {
                let k = other.row_idx[p];
                let b = other.values[p];
                for q in self.col_ptr[k]..self.col_ptr[k + 1] {
                    let i = self.row_idx[q];
                    if !touched[i] {
                        touched[i] = true;
                        list.push(i);
                    }
                    acc[i] += self.values[q] * b;
                }
            }
            list.sort_unstable();
            for &i in &list {
                if acc[i] != ZERO {
                    row_idx.push(i);
                    values.push(acc[i]);
                }
                acc[i] = ZERO;
                touched[i] = false;
            }
            list.clear();
            col_ptr.push(values.len());
        }
        Ok(CscMatrix {
            rows: self.rows,
            cols: other.cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Builds a matrix from per-column `(row, value)` lists. Rows within a
    /// column are sorted; exact zeros are dropped.
    pub fn from_column_entries(rows: usize, columns: Vec<Vec<(usize, Complex64)>>) -> Self {
        let cols = columns.len();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for mut col in columns {
            col.sort_by_key(|&(i, _)| i);
            for (i, z) in col {
                assert!(i < rows, "row index {i} out of range for {rows} rows");
                if z != ZERO {
                    row_idx.push(i);
                    values.push(z);
                }
            }
            col_ptr.push(values.len());
        }
        Self {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut columns: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.rows];
        for j in 0..self.cols {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                columns[self.row_idx[p]].push((j, self.values[p].conj()));
            }
        }
        Self::from_column_entries(self.cols, columns)
    }

    /// Entries of column `j` as `(row, value)`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |p| (self.row_idx[p], self.values[p]))
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                m.set(self.row_idx[p], j, self.values[p]);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csc_products_match_dense() {
        let a = ComplexMatrix::from_rows(&[
            vec![ZERO, Complex64::new(1.0, 2.0), ZERO],
            vec![Complex64::new(-3.0, 0.5), ZERO, Complex64::new(0.0, 1.0)],
            vec![ZERO, ZERO, Complex64::new(2.0, 0.0)],
        ])
        .unwrap();
        let b = a.adjoint().add(&ComplexMatrix::identity(3)).unwrap();
        let ca = CscMatrix::from_dense(&a);
        let cb = CscMatrix::from_dense(&b);
        assert_eq!(ca.to_dense(), a);
        assert_eq!(CscMatrix::adjoint_of(&a).to_dense(), a.adjoint());
        let prod = ca.mul(&cb).unwrap().to_dense();
        assert!(prod.distance(&a.mul(&b).unwrap()).unwrap() < 1e-14);
        let v = vec![Complex64::new(1.0, 0.0), ZERO, Complex64::new(2.0, -1.0)];
        assert_eq!(ca.mul_vec(&v).unwrap(), a.mul_vec(&v).unwrap());
        assert_eq!(CscMatrix::identity(3).mul(&ca).unwrap(), ca);
        assert_eq!(ca.adjoint(), CscMatrix::adjoint_of(&a));
        let col: Vec<_> = ca.column(2).collect();
        assert_eq!(col, vec![(1, Complex64::new(0.0, 1.0)), (2, Complex64::new(2.0, 0.0))]);
        let built = CscMatrix::from_column_entries(3, (0..3).map(|j| {
            let mut c: Vec<_> = ca.column(j).collect();
            c.reverse();
            c.push((0, ZERO));
            c
        }).collect());
        assert_eq!(built, ca);
    }
}
