//! Free unitary dilation of a 2x2 contraction and a scalar: the joint
//! dilation identity, freeness and traciality of the vacuum state.

use freedil::free_product::{dilated_state, free_unitary_dilation, FreeParams};
use freedil::ncprob::{free_independence_check, trace_check, FreeCheckParams, TraceCheckParams};
use freedil::operator::{Complex64, ComplexMatrix, State};
use freedil::random::{contraction, rng, vector_state};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut g = rng(2);
    let factors = vec![
        (contraction(&mut g, 2), vector_state(&mut g, 2)),
        (ComplexMatrix::scalar(Complex64::new(0.3, -0.4)), State::basis(1, 0)),
    ];
    let params = FreeParams::default();
    let fds = free_unitary_dilation(&factors, &params)?;
    println!("Fock dimensions: F(H) = {}, F(K) = {}", fds.fock_h.dim(), fds.fock_k.dim());

    let words = fds.budget_words();
    let mut worst: f64 = 0.0;
    for w in &words {
        worst = worst.max(fds.verify_word(w, params.tol)?.residual);
    }
    println!("J*(U word)J vs S word: {} words, max residual {worst:.2e}", words.len());

    let vacuum = dilated_state(&fds);
    let free = free_independence_check(
        &vacuum,
        &fds.unitaries,
        FreeCheckParams { max_len: 4, degree: 3, samples: 10, seed: 0, tol: 1e-9, pattern_cap: 512 },
    )?;
    println!("freeness: max residual {:.2e} over {} products", free.max_residual, free.evaluated);
    let trace = trace_check(
        &vacuum,
        &fds.unitaries,
        TraceCheckParams { degree: 3, samples: 100, seed: 0, tol: 1e-9, max_alt: Some(params.trunc) },
    )?;
    println!("traciality: max residual {:.2e} over {} pairs", trace.max_residual, trace.evaluated);
    Ok(())
}
