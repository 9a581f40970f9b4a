//! Dense complex matrices stored row-major.

use std::fmt;

use num_complex::Complex64;

use super::OperatorError;

/// Shorthand for the complex zero.
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Shorthand for the complex one.
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense `rows × cols` matrix of double-precision complex scalars.
///
/// Every operator in the crate is carried as a `ComplexMatrix`. Entries are
/// finite; constructors reject NaN and infinities.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Binary and unary operations exposed through [`ComplexMatrix::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixOp {
    Add,
    Multiply,
    Adjoint,
    Kron,
    DirectSum,
    /// Multiplies the first operand by the single entry of a `1 × 1` second operand.
    Scale,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, OperatorError> {
        if data.len() != rows * cols {
            return Err(OperatorError::EntryCount {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(OperatorError::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, OperatorError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(OperatorError::RaggedRows {
                row: bad,
                expected: c,
                found: rows[bad].len(),
            });
        }
        Self::from_vec(r, c, rows.iter().flatten().copied().collect())
    }

    /// Builds a matrix from nested real rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, OperatorError> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// `1 × 1` matrix holding `z`.
    pub fn scalar(z: Complex64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    /// Column matrix built from a vector.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for (i, &z) in c.iter().enumerate() {
                m.data[i * cols + j] = z;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Nested-row copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Dispatches one of the elementary operations. `Adjoint` ignores `b`;
    /// `Scale` multiplies `a` by the single entry of the `1 × 1` matrix `b`.
    pub fn apply(a: &Self, b: &Self, op: MatrixOp) -> Result<Self, OperatorError> {
        match op {
            MatrixOp::Add => a.add(b),
            MatrixOp::Multiply => a.mul(b),
            MatrixOp::Adjoint => Ok(a.adjoint()),
            MatrixOp::Kron => Ok(a.kron(b)),
            MatrixOp::DirectSum => Ok(a.direct_sum(b)),
            MatrixOp::Scale => {
                if b.shape() != (1, 1) {
                    return Err(OperatorError::Shape {
                        op: "scale",
                        left: a.shape(),
                        right: b.shape(),
                    });
                }
                Ok(a.scale(b.data[0]))
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, OperatorError> {
        self.check_same_shape(other, "sub")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    /// Matrix product. Zero entries of `self` are skipped, so products with
    /// structurally sparse left factors (Fock-space operators, block
    /// permutations) cost proportional to their nonzero count.
    pub fn mul(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.cols != other.rows {
            return Err(OperatorError::Shape {
                op: "multiply",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let n = other.cols;
        let mut out = vec![ZERO; self.rows * n];
        for i in 0..self.rows {
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: n,
            data: out,
        })
    }

    /// `self* · other` without materialising the adjoint; zero entries of
    /// `self` are skipped.
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.rows != other.rows {
            return Err(OperatorError::Shape {
                op: "adjoint_multiply",
                left: (self.cols, self.rows),
                right: other.shape(),
            });
        }
        let n = other.cols;
        let mut out = vec![ZERO; self.cols * n];
        for k in 0..self.rows {
            let src = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let a = a.conj();
                for (d, &b) in out[i * n..(i + 1) * n].iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.cols,
            cols: n,
            data: out,
        })
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        if self.cols != v.len() {
            return Err(OperatorError::Shape {
                op: "multiply",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`; the index of `self` is the slow one.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * cols + j] = self.get(i, j);
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.data[(self.rows + i) * cols + self.cols + j] = other.get(i, j);
            }
        }
        out
    }

    /// `k`-th power of a square matrix; `k = 0` gives the identity.
    pub fn pow(&self, k: u32) -> Result<Self, OperatorError> {
        self.check_square("pow")?;
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = self.mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm. Residuals throughout the crate are reported in this
    /// norm, which bounds the operator norm from above.
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to `other`; shapes must agree.
    pub fn distance(&self, other: &Self) -> Result<f64, OperatorError> {
        self.check_same_shape(other, "distance")?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `‖self − I‖_F`.
    pub fn distance_to_identity(&self) -> Result<f64, OperatorError> {
        self.check_square("distance_to_identity")?;
        self.distance(&Self::identity(self.rows))
    }

    /// `‖A − A*‖_F` for square `A`.
    pub fn hermitian_residual(&self) -> Result<f64, OperatorError> {
        self.check_square("hermitian_residual")?;
        self.distance(&self.adjoint())
    }

    /// `‖U*U − I‖_F` and `‖UU* − I‖_F`, the larger of the two.
    pub fn unitarity_residual(&self) -> Result<f64, OperatorError> {
        self.check_square("unitarity_residual")?;
        let a = self.adjoint_mul(self)?.distance_to_identity()?;
        let b = self.mul(&self.adjoint())?.distance_to_identity()?;
        Ok(a.max(b))
    }

    /// `‖AB − BA‖_F`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64, OperatorError> {
        self.mul(other)?.distance(&other.mul(self)?)
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.data[a * cols.len() + b] = self.get(i, j);
            }
        }
        out
    }

    /// Number of entries that are not exactly zero.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&z| z != ZERO).count()
    }

    pub(crate) fn check_square(&self, op: &'static str) -> Result<(), OperatorError> {
        if self.rows != self.cols {
            return Err(OperatorError::NotSquare {
                op,
                shape: self.shape(),
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<(), OperatorError> {
        if self.shape() != other.shape() {
            return Err(OperatorError::Shape {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermitian inner product `⟨a, b⟩ = Σ a_i conj(b_i)`, linear in the first slot.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Kronecker product of two vectors.
pub fn vec_kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Standard basis vector `e_i` of `C^n`.
pub fn basis_vector(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; n];
    v[i] = ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let n = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(n.adjoint(), expect);
    }

    #[test]
    fn adjoint_conjugates() {
        let m = ComplexMatrix::from_rows(&[vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]]).unwrap();
        let a = m.adjoint();
        assert_eq!(a.shape(), (2, 1));
        assert_eq!(a.get(0, 0), Complex64::new(1.0, -2.0));
        assert_eq!(a.get(1, 0), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn identity_is_neutral() {
        let x = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)],
            vec![Complex64::new(0.0, 3.0), Complex64::new(7.0, -1.0)],
        ])
        .unwrap();
        assert_eq!(ComplexMatrix::identity(2).mul(&x).unwrap(), x);
        assert_eq!(x.mul(&ComplexMatrix::identity(2)).unwrap(), x);
    }

    #[test]
    fn kron_with_scalar_is_diagonal() {
        let z = Complex64::new(0.3, -0.7);
        let k = ComplexMatrix::identity(2).kron(&ComplexMatrix::scalar(z));
        assert_eq!(k, ComplexMatrix::diag(&[z, z]));
    }

    #[test]
    fn kron_block_layout() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let k = a.kron(&b);
        assert_eq!(k.get(0, 1), c(1.0));
        assert_eq!(k.get(1, 2), c(2.0));
        assert_eq!(k.get(3, 2), c(4.0));
        assert_eq!(k.get(2, 0), c(0.0));
    }

    #[test]
    fn direct_sum_blocks() {
        let a = ComplexMatrix::scalar(c(2.0));
        let b = ComplexMatrix::identity(2);
        let s = a.direct_sum(&b);
        assert_eq!(s, ComplexMatrix::diag(&[c(2.0), c(1.0), c(1.0)]));
    }

    #[test]
    fn shape_errors_name_both_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        let err = a.mul(&b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3") && msg.contains("multiply"), "{msg}");
        assert!(a.add(&ComplexMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn apply_dispatch() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let two = ComplexMatrix::scalar(c(2.0));
        let s = ComplexMatrix::apply(&a, &two, MatrixOp::Scale).unwrap();
        assert_eq!(s.get(1, 1), c(8.0));
        assert!(ComplexMatrix::apply(&a, &a, MatrixOp::Scale).is_err());
        let sum = ComplexMatrix::apply(&a, &a, MatrixOp::Add).unwrap();
        assert_eq!(sum, a.scale(c(2.0)));
    }

    #[test]
    fn rejects_non_finite_and_bad_length() {
        assert!(ComplexMatrix::from_vec(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_rows(&[vec![ONE], vec![ONE, ONE]]).is_err());
    }

    #[test]
    fn adjoint_mul_matches_explicit_adjoint() {
        let a = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0, 2.0), ZERO],
            vec![Complex64::new(0.5, -1.0), Complex64::new(0.0, 3.0)],
            vec![ZERO, c(2.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[1.0], &[2.0], &[3.0]]).unwrap();
        assert_eq!(a.adjoint_mul(&b).unwrap(), a.adjoint().mul(&b).unwrap());
    }

    #[test]
    fn sparse_skipping_product_matches_dense_definition() {
        let a = ComplexMatrix::from_rows(&[
            vec![ZERO, Complex64::new(1.0, 1.0), ZERO],
            vec![c(2.0), ZERO, ZERO],
        ])
        .unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
        let p = a.mul(&b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect: Complex64 = (0..3).map(|k| a.get(i, k) * b.get(k, j)).sum();
                assert_eq!(p.get(i, j), expect);
            }
        }
    }
}
