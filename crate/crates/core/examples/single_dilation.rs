//! Dilate a random 3x3 contraction and compare compressed powers.

use freedil::dilation::finite_unitary_dilation;
use freedil::random::{contraction, rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = contraction(&mut rng(11), 3);
    let n = 4;
    let dil = finite_unitary_dilation(&t, n, 1e-10)?;
    let u = &dil.unitaries[0];
    println!("ambient dimension {} (degree {n})", dil.ambient_dim);
    println!("unitarity residual {:.2e}", u.unitarity_residual()?);
    for k in 0..=n as u32 + 1 {
        let lhs = dil.embedding.compress(&u.pow(k)?)?;
        let err = lhs.distance(&t.pow(k)?)?;
        let lhs_adj = dil.embedding.compress(&u.adjoint().pow(k)?)?;
        let err_adj = lhs_adj.distance(&t.adjoint().pow(k)?)?;
        println!("k = {k}: |P U^k - T^k| = {err:.2e}   |P U*^k - T*^k| = {err_adj:.2e}");
    }
    Ok(())
}
