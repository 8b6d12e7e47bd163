//! Zero-delay cross-correlation, photon numbers and population inversion.

use modecoupler::observables::{g2, g2_analytic_limits, inversion_ratios, photon_numbers};
use modecoupler::steadystate::analytic;
use modecoupler::SystemParams;

fn main() -> modecoupler::Result<()> {
    for (ga, gb, k, e) in [(0.1, 0.1, 0.3, 1.0), (0.2, 0.01, 0.05, 1.5), (0.2, 0.01, 1.0, 0.5)] {
        let p = SystemParams::new(1.0, k, e, ga, gb, 0.0)?;
        let rho = analytic(&p, None)?.rho;
        let (na, nb) = photon_numbers(&rho);
        let limit = g2_analytic_limits(&p).map(|l| format!("{l:?}")).unwrap_or_else(|e| e.to_string());
        println!("gA = {ga}, gB = {gb}, kappa = {k}, eps = {e}");
        println!("  n_A = {na:.5}, n_B = {nb:.5}, g2 = {:.5}", g2(&rho)?);
        println!("  limit: {limit}");
    }
    let p = SystemParams::collective(1.0, 0.3, 0.9, 0.4, 0.1)?;
    let (r24, r34) = inversion_ratios(&analytic(&p, None)?.rho)?;
    println!("common reservoir: rho22/rho44 = {r24:.4}, rho33/rho44 = {r34:.4}");
    Ok(())
}
