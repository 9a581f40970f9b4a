//! Cut a dilation down to the smallest reducing subspace containing H.

use freedil::dilation::{finite_unitary_dilation, minimal_reducing_subspace, reducing_residual};
use freedil::operator::ComplexMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("nilpotent shift", ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]])?),
        ("diag(0.6, 0.6)", ComplexMatrix::from_real_rows(&[&[0.6, 0.0], &[0.0, 0.6]])?),
        ("unitary swap", ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?),
    ];
    for (name, t) in cases {
        let dil = finite_unitary_dilation(&t, 3, 1e-12)?;
        let m = minimal_reducing_subspace(&dil.unitaries, &dil.embedding, 1e-10)?;
        let r = reducing_residual(&dil.unitaries, &m)?;
        println!("{name}: {} of {} dimensions, reducing residual {r:.1e}", m.small_dim(), dil.ambient_dim);
    }
    Ok(())
}
