//! Product model of two contractions, dilated, then checked for tensor
//! independence in the dilated state.

use freedil::dilation::doubly_commuting_dilation;
use freedil::ncprob::{make_tensor_independent, tensor_independence_check, Family, TensorCheckParams};
use freedil::random::{contraction, density_state, rng, vector_state};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut g = rng(3);
    let factors = vec![
        (contraction(&mut g, 2), vector_state(&mut g, 2)),
        (contraction(&mut g, 2), density_state(&mut g, 2)),
    ];
    let (ts, state) = make_tensor_independent(&factors)?;
    let dil = doubly_commuting_dilation(&ts, 2, 1e-10)?;
    let psi = state.push_forward(&dil.embedding)?;
    let params = TensorCheckParams { degree: 3, samples: 100, seed: 1, tol: 1e-9 };
    let report = tensor_independence_check(&psi, &Family::new(dil.unitaries)?, params)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
