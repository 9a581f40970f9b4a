use num_complex::Complex64;

use crate::operator::{inner, CscMatrix, ComplexMatrix, State};

use super::word::{Element, Letter, Word};
use super::NcError;

/// `evaluate_word`: ordered product of generator matrices with adjoints
/// applied per letter; the empty word evaluates to the identity.
pub fn evaluate_word(w: &Word, gens: &[ComplexMatrix]) -> Result<ComplexMatrix, NcError> {
    let dim = gens.first().map(ComplexMatrix::rows).ok_or(NcError::NoGenerators)?;
    let mut acc = ComplexMatrix::identity(dim);
    for l in w.letters.iter().rev() {
        let g = gens.get(l.factor).ok_or(NcError::UnknownFactor {
            factor: l.factor,
            count: gens.len(),
        })?;
        acc = if l.star { g.adjoint_mul(&acc)? } else { g.mul(&acc)? };
    }
    Ok(acc)
}

/// Generators on one space, stored column-compressed together with their
/// adjoints for fast repeated application.
#[derive(Clone, Debug)]
pub struct Family {
    dim: usize,
    fwd: Vec<CscMatrix>,
    adj: Vec<CscMatrix>,
}

impl Family {
    pub fn new(gens: Vec<ComplexMatrix>) -> Result<Self, NcError> {
        let dim = gens.first().map(ComplexMatrix::rows).ok_or(NcError::NoGenerators)?;
        for (index, g) in gens.iter().enumerate() {
            if g.shape() != (dim, dim) {
                return Err(NcError::GeneratorShape { index, shape: g.shape(), dim });
            }
        }
        let fwd = gens.iter().map(CscMatrix::from_dense).collect();
        let adj = gens.iter().map(CscMatrix::adjoint_of).collect();
        Ok(Self { dim, fwd, adj })
    }

    pub fn from_sparse(gens: Vec<CscMatrix>) -> Result<Self, NcError> {
        let dim = gens.first().map(CscMatrix::rows).ok_or(NcError::NoGenerators)?;
        for (index, g) in gens.iter().enumerate() {
            if (g.rows(), g.cols()) != (dim, dim) {
                return Err(NcError::GeneratorShape {
                    index,
                    shape: (g.rows(), g.cols()),
                    dim,
                });
            }
        }
        let adj = gens.iter().map(CscMatrix::adjoint).collect();
        Ok(Self { dim, fwd: gens, adj })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn generator(&self, i: usize) -> Option<&CscMatrix> {
        self.fwd.get(i)
    }

    fn letter_op(&self, l: Letter) -> Result<&CscMatrix, NcError> {
        let ops = if l.star { &self.adj } else { &self.fwd };
        ops.get(l.factor).ok_or(NcError::UnknownFactor {
            factor: l.factor,
            count: self.fwd.len(),
        })
    }

    pub fn check_word(&self, w: &Word) -> Result<(), NcError> {
        for l in &w.letters {
            self.letter_op(*l)?;
        }
        Ok(())
    }

    /// `w · v`.
    pub fn apply_word(&self, w: &Word, v: &[Complex64]) -> Result<Vec<Complex64>, NcError> {
        let mut out = v.to_vec();
        for l in w.letters.iter().rev() {
            out = self.letter_op(*l)?.mul_vec(&out)?;
        }
        Ok(out)
    }

    /// `el · v`.
    pub fn apply_element(&self, el: &Element, v: &[Complex64]) -> Result<Vec<Complex64>, NcError> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (c, w) in &el.terms {
            let wv = self.apply_word(w, v)?;
            for (o, x) in out.iter_mut().zip(wv) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    /// Sparse operator of a word.
    pub fn word_operator(&self, w: &Word) -> Result<CscMatrix, NcError> {
        let mut acc = CscMatrix::identity(self.dim);
        for l in w.letters.iter().rev() {
            acc = self.letter_op(*l)?.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Dense matrix of a word.
    pub fn word_matrix(&self, w: &Word) -> Result<ComplexMatrix, NcError> {
        Ok(self.word_operator(w)?.to_dense())
    }

    /// Dense matrix of an element.
    pub fn element_matrix(&self, el: &Element) -> Result<ComplexMatrix, NcError> {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for (c, w) in &el.terms {
            acc = acc.add(&self.word_matrix(w)?.scale(*c))?;
        }
        Ok(acc)
    }

    fn check_state(&self, s: &State) -> Result<(), NcError> {
        if s.dim() != self.dim {
            return Err(NcError::StateDimension {
                state: s.dim(),
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// `φ(x)` where `x` is given through its action on vectors.
    fn expect_with(
        &self,
        s: &State,
        act: impl Fn(&[Complex64]) -> Result<Vec<Complex64>, NcError>,
    ) -> Result<Complex64, NcError> {
        self.check_state(s)?;
        match s {
            State::Vector(xi) => Ok(inner(&act(xi)?, xi)),
            State::Density(rho) => {
                let mut total = Complex64::new(0.0, 0.0);
                for j in 0..self.dim {
                    total += act(&rho.col(j))?[j];
                }
                Ok(total)
            }
        }
    }

    /// `φ(w)`.
    pub fn moment(&self, s: &State, w: &Word) -> Result<Complex64, NcError> {
        self.expect_with(s, |v| self.apply_word(w, v))
    }

    /// `φ(el)`.
    pub fn expect(&self, s: &State, el: &Element) -> Result<Complex64, NcError> {
        self.expect_with(s, |v| self.apply_element(el, v))
    }

    /// `φ(a₁ ⋯ a_m)`.
    pub fn expect_product(&self, s: &State, elements: &[Element]) -> Result<Complex64, NcError> {
        self.expect_with(s, |v| {
            let mut out = v.to_vec();
            for el in elements.iter().rev() {
                out = self.apply_element(el, &out)?;
            }
            Ok(out)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn evaluate_word_examples() {
        let n = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(evaluate_word(&Word::unit(), std::slice::from_ref(&n)).unwrap(), ComplexMatrix::identity(2));
        let w: Word = "0* 0".parse().unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(evaluate_word(&w, std::slice::from_ref(&n)).unwrap(), expect);
        let gens = [ComplexMatrix::scalar(r(0.5)), ComplexMatrix::scalar(r(0.2))];
        let p = evaluate_word(&"0 1".parse().unwrap(), &gens).unwrap();
        assert!((p.get(0, 0) - r(0.1)).norm() < 1e-16);
        assert!(matches!(
            evaluate_word(&"2".parse().unwrap(), &gens),
            Err(NcError::UnknownFactor { factor: 2, .. })
        ));
    }

    #[test]
    fn family_agrees_with_dense_evaluation() {
        let a = ComplexMatrix::from_rows(&[
            vec![r(0.1), Complex64::new(0.0, 0.3)],
            vec![r(-0.4), Complex64::new(0.2, 0.2)],
        ])
        .unwrap();
        let b = ComplexMatrix::diag(&[r(0.5), Complex64::new(0.0, 1.0)]);
        let fam = Family::new(vec![a.clone(), b.clone()]).unwrap();
        let w: Word = "0 1* 0* 1".parse().unwrap();
        let dense = evaluate_word(&w, &[a, b]).unwrap();
        assert!(fam.word_matrix(&w).unwrap().distance(&dense).unwrap() < 1e-15);
        for s in [State::basis(2, 1), State::tracial(2)] {
            let m = fam.moment(&s, &w).unwrap();
            assert!((m - s.evaluate(&dense).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn expect_product_matches_matrix_product() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.5]]).unwrap();
        let fam = Family::new(vec![a.clone(), a.adjoint()]).unwrap();
        let e1: Element = "(0.5,0.1)[0] + (1,0)[e]".parse().unwrap();
        let e2: Element = "(0,1)[1 0*]".parse().unwrap();
        let s = State::tracial(2);
        let direct = fam.expect(&s, &e1.mul(&e2)).unwrap();
        let prod = fam.expect_product(&s, &[e1, e2]).unwrap();
        assert!((direct - prod).norm() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_state() {
        let fam = Family::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(fam.moment(&State::basis(3, 0), &Word::unit()).is_err());
        assert!(Family::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]).is_err());
    }
}
