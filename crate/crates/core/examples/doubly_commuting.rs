//! Iterated dilation of a doubly commuting pair.

use freedil::dilation::{double_commutation_residual, doubly_commuting_dilation, verify_power_dilation, SignedPowerWord};
use freedil::random::{doubly_commuting_family, rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ts = doubly_commuting_family(&mut rng(5), 3, 2);
    let (input, _) = double_commutation_residual(&ts)?;
    let dil = doubly_commuting_dilation(&ts, 2, 1e-10)?;
    let (output, _) = double_commutation_residual(&dil.unitaries)?;
    println!("dims {} -> {}", ts[0].rows(), dil.ambient_dim);
    println!("double commutation: input {input:.2e}, output {output:.2e}");

    let mut worst = (0.0, String::new());
    for a in -2..=2 {
        for b in -2..=2 {
            let w = SignedPowerWord::new(vec![(0, a), (1, b)]);
            let r = verify_power_dilation(&dil.view(), &ts, &w, 1e-9)?;
            if r.residual >= worst.0 {
                worst = (r.residual, w.to_string());
            }
        }
    }
    println!("largest word residual {:.2e} at {}", worst.0, worst.1);
    Ok(())
}
