//! Two zero contractions dilate to a free pair of Haar unitaries.

use freedil::free_product::{dilated_state, free_unitary_dilation, FreeParams};
use freedil::ncprob::{free_mixed_moment_oracle, Marginal, UnitaryMarginal, Word};
use freedil::operator::{Complex64, ComplexMatrix, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zero = (ComplexMatrix::scalar(Complex64::new(0.0, 0.0)), State::basis(1, 0));
    let fds = free_unitary_dilation(&[zero.clone(), zero], &FreeParams::default())?;
    let vacuum = dilated_state(&fds);
    for k in -3..=3 {
        let m = fds.unitaries.moment(&vacuum, &Word::power(0, k))? + 0.0;
        println!("phi(U0^{k}) = {:.3}", m.re);
    }
    let haar = UnitaryMarginal::haar(4);
    let margs: Vec<&dyn Marginal> = vec![&haar, &haar];
    for w in ["0 1", "0 1 0 1", "0 1 0* 1*", "0 0* 1 1*"] {
        let w: Word = w.parse()?;
        let fock = fds.unitaries.moment(&vacuum, &w)?;
        let oracle = free_mixed_moment_oracle(&margs, &w)?;
        println!("phi({w}) = {:.3} (oracle {:.3})", fock.re + 0.0, oracle.re + 0.0);
    }
    Ok(())
}
