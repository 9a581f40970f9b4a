//! Non-crossing partitions and free cumulants.

use freedil::ncprob::{free_cumulants, moments_from_cumulants, noncrossing_partitions};
use freedil::operator::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in 1..=8 {
        println!("|NC({k})| = {}", noncrossing_partitions(k)?.len());
    }
    for p in noncrossing_partitions(4)? {
        println!("{:?}", p.blocks());
    }

    // semicircle: only the second cumulant survives
    let m: Vec<Complex64> = [0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let k = free_cumulants(&m)?;
    println!("cumulants {:?}", k.iter().map(|z| z.re).collect::<Vec<_>>());
    let back = moments_from_cumulants(&k)?;
    println!("moments   {:?}", back.iter().map(|z| z.re).collect::<Vec<_>>());
    Ok(())
}
