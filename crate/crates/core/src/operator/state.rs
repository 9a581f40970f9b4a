use num_complex::Complex64;

use super::embedding::Embedding;
use super::matrix::{inner, vec_kron, vec_norm, ComplexMatrix, ONE};
use super::spectral::{hermitian_eigen, psd_sqrt};
use super::OperatorError;

/// A state on `B(C^d)`: a unit vector `ξ` (`a ↦ ⟨aξ, ξ⟩`) or a density
/// matrix `ρ` (`a ↦ tr(ρa)`).
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Vector(Vec<Complex64>),
    Density(ComplexMatrix),
}

impl State {
    /// Vector state; `‖ξ‖ = 1` must hold within `tol`.
    pub fn vector(xi: Vec<Complex64>, tol: f64) -> Result<Self, OperatorError> {
        let norm = vec_norm(&xi);
        if (norm - 1.0).abs() > tol {
            return Err(OperatorError::NotUnitVector { norm });
        }
        Ok(State::Vector(xi))
    }

    /// Density state; `ρ` must be Hermitian, PSD and of unit trace within `tol`.
    pub fn density(rho: ComplexMatrix, tol: f64) -> Result<Self, OperatorError> {
        rho.check_square("density")?;
        let residual = rho.hermitian_residual()?;
        if residual > tol {
            return Err(OperatorError::NotHermitian { residual });
        }
        let eig = hermitian_eigen(&rho)?;
        if let Some(&min) = eig.values.first() {
            if min < -tol {
                return Err(OperatorError::NotPsd { eigenvalue: min });
            }
        }
        let trace = rho.trace();
        if (trace - ONE).norm() > tol {
            return Err(OperatorError::BadTrace { trace: trace.re });
        }
        Ok(State::Density(rho))
    }

    /// Vector state at the `i`-th standard basis vector of `C^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        State::Vector(super::matrix::basis_vector(dim, i))
    }

    /// Normalised trace `I/d`.
    pub fn tracial(dim: usize) -> Self {
        State::Density(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn dim(&self) -> usize {
        match self {
            State::Vector(v) => v.len(),
            State::Density(r) => r.rows(),
        }
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, State::Vector(_))
    }

    /// `φ(a)`.
    pub fn evaluate(&self, a: &ComplexMatrix) -> Result<Complex64, OperatorError> {
        let d = self.dim();
        if a.shape() != (d, d) {
            return Err(OperatorError::Shape {
                op: "evaluate_state",
                left: a.shape(),
                right: (d, d),
            });
        }
        match self {
            State::Vector(xi) => Ok(inner(&a.mul_vec(xi)?, xi)),
            State::Density(rho) => Ok((0..d)
                .map(|i| (0..d).map(|k| rho.get(i, k) * a.get(k, i)).sum::<Complex64>())
                .sum()),
        }
    }

    /// Density-matrix form (`ξξ*` for a vector state).
    pub fn to_density(&self) -> ComplexMatrix {
        match self {
            State::Density(r) => r.clone(),
            State::Vector(xi) => {
                let col = ComplexMatrix::column(xi);
                col.mul(&col.adjoint()).expect("column times row")
            }
        }
    }

    /// Tensor product state on `C^{d₁} ⊗ C^{d₂}`.
    pub fn tensor(&self, other: &State) -> State {
        match (self, other) {
            (State::Vector(a), State::Vector(b)) => State::Vector(vec_kron(a, b)),
            _ => State::Density(self.to_density().kron(&other.to_density())),
        }
    }

    /// `φ ∘ ad E*`: the state on the big space that evaluates `a` as
    /// `φ(E* a E)`.
    pub fn push_forward(&self, e: &Embedding) -> Result<State, OperatorError> {
        if e.small_dim() != self.dim() {
            return Err(OperatorError::Shape {
                op: "push_forward",
                left: (self.dim(), self.dim()),
                right: e.isometry().shape(),
            });
        }
        match self {
            State::Vector(xi) => Ok(State::Vector(e.lift_vector(xi)?)),
            State::Density(rho) => Ok(State::Density(e.lift_operator(rho)?)),
        }
    }
}

/// `evaluate_state(s, a)`.
pub fn evaluate_state(s: &State, a: &ComplexMatrix) -> Result<Complex64, OperatorError> {
    s.evaluate(a)
}

/// Vector-state form of a density state on `C^d ⊗ C^d`.
#[derive(Clone, Debug)]
pub struct Purification {
    /// The purifying unit vector `ξ = vec(ρ^{1/2})`.
    pub state: State,
    dim: usize,
}

impl Purification {
    /// Dimension of the original space.
    pub fn factor_dim(&self) -> usize {
        self.dim
    }

    /// `a ↦ a ⊗ I`.
    pub fn lift(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, OperatorError> {
        if a.shape() != (self.dim, self.dim) {
            return Err(OperatorError::Shape {
                op: "purify.lift",
                left: a.shape(),
                right: (self.dim, self.dim),
            });
        }
        Ok(a.kron(&ComplexMatrix::identity(self.dim)))
    }
}

/// Purifies a density state: `ξ = Σ_k ρ^{1/2} e_k ⊗ e_k`, so that
/// `⟨(a ⊗ I)ξ, ξ⟩ = tr(ρ a)`. A vector state is purified the same way via
/// its projector.
pub fn purify(rho: &State, tol: f64) -> Result<Purification, OperatorError> {
    let d = rho.dim();
    let density = match rho {
        State::Density(r) => State::density(r.clone(), tol)?.to_density(),
        State::Vector(_) => rho.to_density(),
    };
    let root = psd_sqrt(&density, tol)?;
    let mut xi = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            xi[i * d + k] = root.get(i, k);
        }
    }
    // renormalise away the clamping error of the square root
    let n = vec_norm(&xi);
    xi.iter_mut().for_each(|z| *z /= n);
    Ok(Purification {
        state: State::vector(xi, tol.max(1e-6))?,
        dim: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn vector_and_density_evaluation() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(evaluate_state(&State::basis(2, 0), &a).unwrap(), r(1.0));
        let half = State::tracial(2);
        let d = ComplexMatrix::diag(&[r(1.0), r(3.0)]);
        assert!((half.evaluate(&d).unwrap() - r(2.0)).norm() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            State::vector(vec![r(1.0), r(1.0)], 1e-9),
            Err(OperatorError::NotUnitVector { .. })
        ));
        let bad = ComplexMatrix::diag(&[r(1.01), r(-0.01)]);
        match State::density(bad, 1e-9) {
            Err(OperatorError::NotPsd { eigenvalue }) => assert!((eigenvalue + 0.01).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            State::density(ComplexMatrix::diag(&[r(0.5), r(0.4)]), 1e-9),
            Err(OperatorError::BadTrace { .. })
        ));
    }

    #[test]
    fn purify_pure_projector() {
        let rho = State::Density(ComplexMatrix::diag(&[r(1.0), r(0.0)]));
        let p = purify(&rho, 1e-9).unwrap();
        let State::Vector(xi) = &p.state else { panic!() };
        let expect = vec_kron(&[r(1.0), r(0.0)], &[r(1.0), r(0.0)]);
        assert!(xi.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn purify_maximally_mixed() {
        let p = purify(&State::tracial(2), 1e-9).unwrap();
        let State::Vector(xi) = &p.state else { panic!() };
        let s = 0.5f64.sqrt();
        let expect = [r(s), r(0.0), r(0.0), r(s)];
        assert!(xi.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-15));
        let a = ComplexMatrix::diag(&[r(1.0), r(3.0)]);
        let v = p.state.evaluate(&p.lift(&a).unwrap()).unwrap();
        assert!((v - r(2.0)).norm() < 1e-14);
    }

    #[test]
    fn push_forward_and_tensor() {
        let e = Embedding::leading(3, 2).unwrap();
        let s = State::tracial(2).push_forward(&e).unwrap();
        assert!((s.evaluate(&ComplexMatrix::identity(3)).unwrap() - r(1.0)).norm() < 1e-15);
        let t = State::basis(2, 1).tensor(&State::basis(3, 2));
        assert_eq!(t, State::basis(6, 5));
    }
}
