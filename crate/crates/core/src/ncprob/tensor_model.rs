use crate::operator::{ComplexMatrix, OperatorError, State};

use super::NcError;

/// Largest product dimension [`make_tensor_independent`] will build.
pub const TENSOR_DIM_CAP: usize = 4096;

/// Places each `tᵢ` in its own tensor slot, `I ⊗ ⋯ ⊗ tᵢ ⊗ ⋯ ⊗ I`, and
/// returns the generators with the product state.
pub fn make_tensor_independent(factors: &[(ComplexMatrix, State)]) -> Result<(Vec<ComplexMatrix>, State), NcError> {
    if factors.is_empty() {
        return Err(NcError::NoGenerators);
    }
    let mut dim: usize = 1;
    for (index, (t, s)) in factors.iter().enumerate() {
        if !t.is_square() {
            return Err(OperatorError::NotSquare {
                op: "make_tensor_independent",
                shape: t.shape(),
            }
            .into());
        }
        if s.dim() != t.rows() {
            return Err(NcError::GeneratorShape {
                index,
                shape: t.shape(),
                dim: s.dim(),
            });
        }
        dim = dim.saturating_mul(t.rows());
    }
    if dim > TENSOR_DIM_CAP {
        return Err(NcError::TensorOverflow {
            dim,
            limit: TENSOR_DIM_CAP,
        });
    }
    let dims: Vec<usize> = factors.iter().map(|(t, _)| t.rows()).collect();
    let gens = factors
        .iter()
        .enumerate()
        .map(|(i, (t, _))| {
            let before: usize = dims[..i].iter().product();
            let after: usize = dims[i + 1..].iter().product();
            ComplexMatrix::identity(before).kron(t).kron(&ComplexMatrix::identity(after))
        })
        .collect();
    let mut state = factors[0].1.clone();
    for (_, s) in &factors[1..] {
        state = state.tensor(s);
    }
    Ok((gens, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Complex64;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn two_scalars() {
        let s = State::basis(1, 0);
        let (g, st) =
            make_tensor_independent(&[(ComplexMatrix::scalar(r(0.5)), s.clone()), (ComplexMatrix::scalar(r(0.2)), s)])
                .unwrap();
        let prod = st.evaluate(&g[0].mul(&g[1]).unwrap()).unwrap();
        assert!((prod - r(0.1)).norm() < 1e-16);
        assert!((prod - st.evaluate(&g[0]).unwrap() * st.evaluate(&g[1]).unwrap()).norm() < 1e-16);
    }

    #[test]
    fn one_factor_is_identity_embedding() {
        let t = ComplexMatrix::from_real_rows(&[&[0.1, 0.2], &[0.3, 0.4]]).unwrap();
        let (g, st) = make_tensor_independent(&[(t.clone(), State::tracial(2))]).unwrap();
        assert_eq!(g, vec![t]);
        assert_eq!(st, State::tracial(2));
    }

    #[test]
    fn slots_commute() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.2, 0.0]]).unwrap();
        let (g, _) = make_tensor_independent(&[(a, State::basis(2, 0)), (b, State::basis(2, 1))]).unwrap();
        assert_eq!(g[0].commutator_norm(&g[1]).unwrap(), 0.0);
        assert_eq!(g[0].commutator_norm(&g[1].adjoint()).unwrap(), 0.0);
    }

    #[test]
    fn overflow_guard() {
        let big = (ComplexMatrix::identity(70), State::tracial(70));
        let f = vec![big.clone(), big];
        assert!(matches!(make_tensor_independent(&f), Err(NcError::TensorOverflow { dim: 4900, .. })));
    }
}
