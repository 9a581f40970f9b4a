use num_complex::Complex64;
use rayon::prelude::*;

use crate::dilation::{check_budget, finite_unitary_dilation, PowerResidual, SignedPowerWord, WordMode};
use crate::ncprob::{Family, UnitaryMarginal, Word};
use crate::operator::{basis_vector, purify, ComplexMatrix, CscMatrix, Embedding, State, ZERO};

use super::fock::{build_fock, left_representation_sparse, FockBasis, DEFAULT_FOCK_CAP};
use super::pointed::PointedSpace;
use super::FreeError;

/// Budgets of a free dilation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeParams {
    /// Dilation degree `N`.
    pub degree: usize,
    /// Fock truncation length `L`.
    pub trunc: usize,
    pub tol: f64,
    pub cap: usize,
}

impl Default for FreeParams {
    fn default() -> Self {
        Self {
            degree: 3,
            trunc: 4,
            tol: 1e-8,
            cap: DEFAULT_FOCK_CAP,
        }
    }
}

/// Free unitary dilation of a tuple of contractions.
#[derive(Clone, Debug)]
pub struct FreeDilationScenario {
    pub params: FreeParams,
    /// Contractions `tᵢ` as used; density inputs appear as `tᵢ ⊗ I`.
    pub contractions: Vec<ComplexMatrix>,
    /// Whether factor `i` went through purification.
    pub purified: Vec<bool>,
    /// Finite dilations `Vᵢ` on `Kᵢ`.
    pub dilations: Vec<ComplexMatrix>,
    /// Free product of the `(Hᵢ, ξᵢ)`.
    pub fock_h: FockBasis,
    /// Free product of the `(Kᵢ, ξᵢ)`.
    pub fock_k: FockBasis,
    /// `Uᵢ = λᵢ(Vᵢ)` on `F(K•)`.
    pub unitaries: Family,
    /// `Sᵢ = λᵢ(tᵢ)` on `F(H•)`.
    pub originals: Family,
    /// `J` as a map from `F(H•)` basis indices to `F(K•)` basis indices.
    pub j_index: Vec<usize>,
}

/// Dilates each `tᵢ` to `Vᵢ` of degree `N`, forms both truncated free
/// products and the left actions on them.
pub fn free_unitary_dilation(factors: &[(ComplexMatrix, State)], p: &FreeParams) -> Result<FreeDilationScenario, FreeError> {
    if factors.is_empty() {
        return Err(FreeError::NoFactors);
    }
    let mut contractions = Vec::new();
    let mut purified = Vec::new();
    let mut pointed_h = Vec::new();
    let mut dilations = Vec::new();
    let mut pointed_k = Vec::new();
    for (index, (t, s)) in factors.iter().enumerate() {
        if t.shape() != (s.dim(), s.dim()) {
            return Err(FreeError::FactorShape {
                index,
                shape: t.shape(),
                state_dim: s.dim(),
            });
        }
        let (t, xi, was_purified) = match s {
            State::Vector(xi) => (t.clone(), xi.clone(), false),
            State::Density(_) => {
                let pur = purify(s, p.tol)?;
                let xi = match &pur.state {
                    State::Vector(v) => v.clone(),
                    State::Density(_) => unreachable!("purification yields a vector state"),
                };
                (pur.lift(t)?, xi, true)
            }
        };
        let h = PointedSpace::from_vector(xi, p.tol.max(1e-6))?;
        let dil = finite_unitary_dilation(&t, p.degree, p.tol)?;
        let v = dil.unitaries.into_iter().next().expect("one unitary per contraction");
        pointed_k.push(h.extended(v.rows()));
        pointed_h.push(h);
        contractions.push(t);
        dilations.push(v);
        purified.push(was_purified);
    }
    let fock_k = build_fock(&pointed_k, p.trunc, p.cap)?;
    let fock_h = build_fock(&pointed_h, p.trunc, p.cap)?;
    let us: Vec<CscMatrix> = dilations
        .iter()
        .enumerate()
        .map(|(i, v)| left_representation_sparse(i, v, &fock_k))
        .collect::<Result<_, _>>()?;
    let ss: Vec<CscMatrix> = contractions
        .iter()
        .enumerate()
        .map(|(i, t)| left_representation_sparse(i, t, &fock_h))
        .collect::<Result<_, _>>()?;
    let j_index = fock_h
        .labels()
        .iter()
        .map(|l| fock_k.index_of(l).expect("complements nest"))
        .collect();
    Ok(FreeDilationScenario {
        params: *p,
        contractions,
        purified,
        dilations,
        fock_h,
        fock_k,
        unitaries: Family::from_sparse(us)?,
        originals: Family::from_sparse(ss)?,
        j_index,
    })
}

/// Vector state at the vacuum of `F(K•)`, which is `φ ∘ ad P_{F(H•)}`
/// because `J` maps the vacuum to the vacuum.
pub fn dilated_state(fds: &FreeDilationScenario) -> State {
    State::basis(fds.fock_k.dim(), 0)
}

impl FreeDilationScenario {
    pub fn len(&self) -> usize {
        self.dilations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dilations.is_empty()
    }

    /// Vacuum state of `F(H•)`.
    pub fn original_state(&self) -> State {
        State::basis(self.fock_h.dim(), 0)
    }

    pub fn dilated_state(&self) -> State {
        dilated_state(self)
    }

    /// `J : F(H•) → F(K•)` as a dense isometry.
    pub fn embedding(&self) -> Embedding {
        Embedding::coordinate(self.fock_k.dim(), &self.j_index).expect("labels are distinct")
    }

    /// `‖J*J − I‖_F`, computed from the label map.
    pub fn j_isometry_residual(&self) -> f64 {
        let mut seen = std::collections::HashSet::new();
        let repeats = self.j_index.iter().filter(|&&k| !seen.insert(k)).count();
        (2.0 * repeats as f64).sqrt()
    }

    /// Moment tables `k ↦ ψᵢ(Vᵢ^k)` for `|k| ≤ max(N, L)`.
    pub fn marginals(&self) -> Result<Vec<UnitaryMarginal>, FreeError> {
        let max = self.params.degree.max(self.params.trunc) as i64;
        self.dilations
            .iter()
            .zip(self.fock_k.factors())
            .map(|(v, p)| Ok(UnitaryMarginal::from_matrix(v, &State::Vector(p.base().to_vec()), max)?))
            .collect()
    }

    /// Exactness budget for power words.
    pub fn mode(&self) -> WordMode {
        WordMode::Free {
            alternation_budget: self.params.trunc,
        }
    }

    /// Checks `J*(U_{i₁}^{k₁}⋯)J = S_{i₁}^{k₁}⋯` for one word inside the
    /// budget.
    pub fn verify_word(&self, word: &SignedPowerWord, tol: f64) -> Result<PowerResidual, FreeError> {
        check_budget(self.params.degree, self.mode(), word)?;
        let w = Word::from(word);
        self.unitaries.check_word(&w)?;
        let dk = self.fock_k.dim();
        let columns: Vec<Vec<Complex64>> = self
            .j_index
            .par_iter()
            .map(|&k| {
                let out = self.unitaries.apply_word(&w, &basis_vector(dk, k))?;
                Ok(self.j_index.iter().map(|&r| out[r]).collect())
            })
            .collect::<Result<_, FreeError>>()?;
        let lhs = ComplexMatrix::from_columns(self.fock_h.dim(), &columns);
        let rhs = self.originals.word_matrix(&w)?;
        let residual = lhs.distance(&rhs)?;
        Ok(PowerResidual {
            word: word.clone(),
            residual,
            pass: residual <= tol,
        })
    }

    /// Every nonnegative power word inside the budget: total degree
    /// `1..=N`, alternation `≤ L`.
    pub fn budget_words(&self) -> Vec<SignedPowerWord> {
        fn go(n: usize, left: i64, max_alt: usize, cur: &mut Vec<(usize, i64)>, out: &mut Vec<SignedPowerWord>) {
            if !cur.is_empty() {
                out.push(SignedPowerWord::new(cur.clone()));
            }
            if left == 0 || cur.len() == max_alt {
                return;
            }
            for f in 0..n {
                if cur.last().is_some_and(|&(g, _)| g == f) {
                    continue;
                }
                for k in 1..=left {
                    cur.push((f, k));
                    go(n, left - k, max_alt, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self.len(), self.params.degree as i64, self.params.trunc, &mut Vec::new(), &mut out);
        out
    }

    /// `‖(Uᵢ*Uᵢ − I)‖_F` and `‖(UᵢUᵢ* − I)‖_F` restricted to basis vectors
    /// of length `< L`, where the truncation does not act; the larger of
    /// the two.
    pub fn domain_unitarity_residual(&self, i: usize) -> Result<f64, FreeError> {
        let u = self.unitaries.generator(i).ok_or(FreeError::UnknownFactor {
            factor: i,
            count: self.len(),
        })?;
        let ua = u.adjoint();
        let inside: Vec<bool> = self.fock_k.labels().iter().map(|l| l.len() < self.params.trunc).collect();
        let mut worst: f64 = 0.0;
        for prod in [ua.mul(u)?, u.mul(&ua)?] {
            let mut sq = 0.0;
            for c in (0..prod.cols()).filter(|&c| inside[c]) {
                let mut diag = ZERO;
                for (r, z) in prod.column(c) {
                    if r == c {
                        diag = z;
                    } else if inside[r] {
                        sq += z.norm_sqr();
                    }
                }
                sq += (diag - Complex64::new(1.0, 0.0)).norm_sqr();
            }
            worst = worst.max(sq.sqrt());
        }
        Ok(worst)
    }

    /// `Uᵢ` on the invariant subspace spanned by the vacuum and the
    /// length-one labels of factor `i`, with the vacuum state there. This
    /// is `Vᵢ` in the basis `(ξᵢ, complement)`.
    pub fn factor_cyclic(&self, i: usize) -> Result<(ComplexMatrix, State), FreeError> {
        let u = self.unitaries.generator(i).ok_or(FreeError::UnknownFactor {
            factor: i,
            count: self.len(),
        })?;
        let c = self.fock_k.factors()[i].complement_dim();
        let mut idx = vec![0];
        idx.extend((0..c).map(|m| self.fock_k.index_of(&[(i, m)]).expect("length-one label")));
        let dk = self.fock_k.dim();
        let cols: Vec<Vec<Complex64>> = idx
            .iter()
            .map(|&k| {
                let out = u.mul_vec(&basis_vector(dk, k))?;
                Ok(idx.iter().map(|&r| out[r]).collect())
            })
            .collect::<Result<_, FreeError>>()?;
        Ok((ComplexMatrix::from_columns(idx.len(), &cols), State::basis(idx.len(), 0)))
    }
}
