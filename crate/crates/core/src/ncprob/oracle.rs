use std::collections::HashMap;

use num_complex::Complex64;

use crate::operator::{ComplexMatrix, State};

use super::family::evaluate_word;
use super::word::{Letter, Word};
use super::NcError;

/// Longest word the oracle accepts.
pub const MAX_ORACLE_LEN: usize = 16;

/// Moments of one factor: `w` only contains letters of `factor`.
pub trait Marginal: Sync {
    fn moment(&self, factor: usize, w: &Word) -> Result<Complex64, NcError>;
}

impl<F> Marginal for F
where
    F: Fn(&Word) -> Result<Complex64, NcError> + Sync,
{
    fn moment(&self, _factor: usize, w: &Word) -> Result<Complex64, NcError> {
        self(w)
    }
}

/// Marginal of a unitary given by its moment table `k ↦ ψ(V^k)`, `|k| ≤ max`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMarginal {
    max: i64,
    table: Vec<Complex64>,
}

impl UnitaryMarginal {
    /// `table[k + max] = ψ(V^k)`.
    pub fn from_table(max: i64, table: Vec<Complex64>) -> Self {
        assert_eq!(table.len() as i64, 2 * max + 1, "moment table length");
        Self { max, table }
    }

    /// Haar moments `δ_{k,0}` for `|k| ≤ max`.
    pub fn haar(max: i64) -> Self {
        let table = (-max..=max)
            .map(|k| Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self { max, table }
    }

    /// Moments `⟨V^k⟩_s` of a unitary matrix for `|k| ≤ max`.
    pub fn from_matrix(v: &ComplexMatrix, s: &State, max: i64) -> Result<Self, NcError> {
        let table = (-max..=max)
            .map(|k| Ok(s.evaluate(&evaluate_word(&Word::power(0, k), std::slice::from_ref(v))?)?))
            .collect::<Result<_, NcError>>()?;
        Ok(Self { max, table })
    }

    pub fn max_power(&self) -> i64 {
        self.max
    }

    pub fn value(&self, k: i64) -> Option<Complex64> {
        (k.abs() <= self.max).then(|| self.table[(k + self.max) as usize])
    }
}

impl Marginal for UnitaryMarginal {
    fn moment(&self, factor: usize, w: &Word) -> Result<Complex64, NcError> {
        let k = w.net_exponent();
        self.value(k).ok_or(NcError::MarginalOutOfRange {
            factor,
            k,
            max: self.max,
        })
    }
}

/// Marginal given by one generator matrix and a state.
#[derive(Clone, Debug)]
pub struct MatrixMarginal {
    pub generator: ComplexMatrix,
    pub state: State,
}

impl MatrixMarginal {
    pub fn new(generator: ComplexMatrix, state: State) -> Self {
        Self { generator, state }
    }
}

impl Marginal for MatrixMarginal {
    fn moment(&self, _factor: usize, w: &Word) -> Result<Complex64, NcError> {
        let local = Word::new(w.letters.iter().map(|l| Letter::new(0, l.star)).collect());
        let m = evaluate_word(&local, std::slice::from_ref(&self.generator))?;
        Ok(self.state.evaluate(&m)?)
    }
}

/// Mixed moments of free variables determined by their marginals.
///
/// A word is split into maximal single-factor blocks `a₁ ⋯ a_m`. Freeness
/// gives `φ(Π (aⱼ − φ(aⱼ))) = 0`; expanding the product leaves `φ(a₁⋯a_m)`
/// as a combination of moments of strictly shorter words.
pub struct FreeOracle<'a> {
    marginals: Vec<&'a dyn Marginal>,
    memo: HashMap<Word, Complex64>,
}

impl<'a> FreeOracle<'a> {
    pub fn new(marginals: Vec<&'a dyn Marginal>) -> Self {
        Self {
            marginals,
            memo: HashMap::new(),
        }
    }

    fn marginal(&self, factor: usize, w: &Word) -> Result<Complex64, NcError> {
        self.marginals
            .get(factor)
            .ok_or(NcError::MissingMarginal(factor))?
            .moment(factor, w)
    }

    pub fn moment(&mut self, w: &Word) -> Result<Complex64, NcError> {
        if w.len() > MAX_ORACLE_LEN {
            return Err(NcError::DepthGuard {
                len: w.len(),
                limit: MAX_ORACLE_LEN,
            });
        }
        if let Some(v) = self.memo.get(w) {
            return Ok(*v);
        }
        let blocks = w.blocks();
        let value = match blocks.len() {
            0 => Complex64::new(1.0, 0.0),
            1 => self.marginal(blocks[0].0, &blocks[0].1)?,
            m => {
                let centers = blocks
                    .iter()
                    .map(|(f, b)| self.marginal(*f, b))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut total = Complex64::new(0.0, 0.0);
                for mask in 0..(1u32 << m) - 1 {
                    let mut coef = Complex64::new(1.0, 0.0);
                    let mut sub = Word::unit();
                    for (j, (_, b)) in blocks.iter().enumerate() {
                        if mask & (1 << j) != 0 {
                            sub.letters.extend_from_slice(&b.letters);
                        } else {
                            coef *= -centers[j];
                        }
                    }
                    if coef != Complex64::new(0.0, 0.0) {
                        total += coef * self.moment(&sub)?;
                    }
                }
                -total
            }
        };
        self.memo.insert(w.clone(), value);
        Ok(value)
    }
}

/// One-shot form of [`FreeOracle::moment`].
pub fn free_mixed_moment_oracle(marginals: &[&dyn Marginal], w: &Word) -> Result<Complex64, NcError> {
    FreeOracle::new(marginals.to_vec()).moment(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn single_factor_is_verbatim() {
        let m = |w: &Word| Ok(r(w.len() as f64 + 0.5));
        let v = free_mixed_moment_oracle(&[&m], &w("0 0* 0")).unwrap();
        assert_eq!(v, r(3.5));
    }

    #[test]
    fn haar_pair() {
        let h = UnitaryMarginal::haar(3);
        let ms: [&dyn Marginal; 2] = [&h, &h];
        assert!(free_mixed_moment_oracle(&ms, &w("0 1 0* 1*")).unwrap().norm() < 1e-15);
        assert!((free_mixed_moment_oracle(&ms, &w("0 1 1* 0*")).unwrap() - r(1.0)).norm() < 1e-15);
        assert!(free_mixed_moment_oracle(&ms, &w("0 1 0 1")).unwrap().norm() < 1e-15);
    }

    #[test]
    fn product_of_scalars_factorizes() {
        let a = MatrixMarginal::new(ComplexMatrix::scalar(r(0.5)), State::basis(1, 0));
        let b = MatrixMarginal::new(ComplexMatrix::scalar(r(0.5)), State::basis(1, 0));
        let v = free_mixed_moment_oracle(&[&a, &b], &w("0 1")).unwrap();
        assert!((v - r(0.25)).norm() < 1e-15);
    }

    #[test]
    fn four_letter_formula() {
        // φ(a₁b₁a₂b₂) = φ(a₁a₂)φ(b₁)φ(b₂) + φ(a₁)φ(a₂)φ(b₁b₂) − φ(a₁)φ(a₂)φ(b₁)φ(b₂)
        let t = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.3, 0.1), r(0.4)],
            vec![r(-0.2), Complex64::new(0.0, 0.5)],
        ])
        .unwrap();
        let s = ComplexMatrix::from_rows(&[vec![r(0.1), Complex64::new(0.2, -0.3)], vec![r(0.6), r(0.2)]]).unwrap();
        let st = State::vector(vec![r(0.6), Complex64::new(0.0, 0.8)], 1e-12).unwrap();
        let a = MatrixMarginal::new(t.clone(), st.clone());
        let b = MatrixMarginal::new(s.clone(), State::tracial(2));
        let pa = |x: &str| a.moment(0, &w(x)).unwrap();
        let pb = |x: &str| b.moment(1, &w(x)).unwrap();
        let expect = pa("0 0*") * pb("1") * pb("1*") + pa("0") * pa("0*") * pb("1 1*")
            - pa("0") * pa("0*") * pb("1") * pb("1*");
        let got = free_mixed_moment_oracle(&[&a, &b], &w("0 1 0* 1*")).unwrap();
        assert!((got - expect).norm() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn guards() {
        let h = UnitaryMarginal::haar(2);
        let ms: [&dyn Marginal; 1] = [&h];
        assert!(matches!(
            free_mixed_moment_oracle(&ms, &w("0 0 0")),
            Err(NcError::MarginalOutOfRange { k: 3, .. })
        ));
        assert!(matches!(free_mixed_moment_oracle(&ms, &w("1")), Err(NcError::MissingMarginal(1))));
        let long = Word::new(vec![Letter::new(0, false); 17]);
        assert!(matches!(
            free_mixed_moment_oracle(&ms, &long),
            Err(NcError::DepthGuard { .. })
        ));
    }

    #[test]
    fn unitary_marginal_from_matrix() {
        let v = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let m = UnitaryMarginal::from_matrix(&v, &State::basis(2, 0), 2).unwrap();
        assert_eq!(m.value(1), Some(r(0.0)));
        assert_eq!(m.value(-2), Some(r(1.0)));
        assert_eq!(m.value(3), None);
    }
}
