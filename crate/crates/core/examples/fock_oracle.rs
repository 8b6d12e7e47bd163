//! Full master equation in a truncated Fock space against the X-state system.

use modecoupler::dynamics::fock::{evolve_fock, FockState};
use modecoupler::dynamics::{step_bound, Integrator};
use modecoupler::validation::oracle_comparison;
use modecoupler::SystemParams;

fn main() -> modecoupler::Result<()> {
    let p = SystemParams::new(1.0, 0.3, 0.5, 0.4, 0.1, 0.0)?;
    let c = oracle_comparison(&p, 1, 20.0, 100)?;
    println!("one photon per mode, {} samples:", c.samples);
    println!("  populations {:.2e}, rho23 {:.2e}, |rho14| {:.2e}", c.populations, c.rho23, c.abs_rho14);
    println!("  coherences outside the X pattern stay below {:.1e}", c.off_x);

    // allowing two photons per mode, the pair term populates |2,2> and friends
    let f = evolve_fock(&p, 2, &FockState::vacuum(2), 20.0, &Integrator::sampled(step_bound(&p), 20.0, 4))?;
    for (t, s) in f.times.iter().zip(&f.states) {
        let (na, nb) = s.photon_numbers();
        println!("n_max = 2, t = {t:>5.1}: n_A = {na:.5}, n_B = {nb:.5}, outside one-photon block {:.3e}", s.leakage());
    }
    println!("{}", serde_json::to_string(&FockState::vacuum(1).dump(0.0)?)?);
    Ok(())
}
