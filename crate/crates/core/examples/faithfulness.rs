//! Gram-rank faithfulness of a state on the span of words.

use freedil::dilation::finite_unitary_dilation;
use freedil::ncprob::{faithfulness_check, Family};
use freedil::operator::{Complex64, ComplexMatrix, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = ComplexMatrix::scalar(Complex64::new(0.5, 0.0));
    let dil = finite_unitary_dilation(&t, 3, 1e-12)?;
    let psi = State::basis(1, 0).push_forward(&dil.embedding)?;
    let rep = faithfulness_check(&psi, &Family::new(dil.unitaries)?, 3)?;
    println!("dilated scalar: faithful_on_span = {} ({} / {})", rep.faithful_on_span, rep.gram_rank, rep.span_dim);

    let d = ComplexMatrix::diag(&[Complex64::new(0.5, 0.0), Complex64::new(0.25, 0.0)]);
    let rep = faithfulness_check(&State::basis(2, 0), &Family::new(vec![d])?, 2)?;
    println!("diag(0.5, 0.25) at e0: faithful_on_span = {} ({} / {})", rep.faithful_on_span, rep.gram_rank, rep.span_dim);
    if let Some(w) = rep.report.worst_witness {
        println!("kernel witness x*x = {w}");
    }
    Ok(())
}
