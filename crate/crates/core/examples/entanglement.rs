//! Concurrence from one- and two-photon coherences.

use modecoupler::observables::{concurrence, concurrence_analytic_collective, concurrence_analytic_independent};
use modecoupler::steadystate::analytic;
use modecoupler::SystemParams;

fn main() -> modecoupler::Result<()> {
    let g0 = 0.01f64;
    let s = (4.0 + g0 * g0).sqrt();
    println!("balanced separate decay, c2 against eps/s:");
    for x in [0.1, 0.2, 0.25, 0.309, 0.4, 0.6] {
        let p = SystemParams::new(1.0, 0.1, x * s, g0, g0, 0.0)?;
        let c = concurrence_analytic_independent(&p)?;
        println!("  {x:.3}: c1 = {:+.5}, c2 = {:+.5}", c.c1, c.c2);
    }

    println!("unbalanced separate decay (gA = 0.2, gB = 0.01):");
    for (k, e) in [(0.02, 0.5), (0.02, 1.6), (0.05, 3.0), (0.5, 1.6)] {
        let p = SystemParams::new(1.0, k, e, 0.2, 0.01, 0.0)?;
        let c = concurrence(&analytic(&p, None)?.rho);
        println!("  kappa = {k}, eps = {e}: C = {:.5} (c1 {:+.5}, c2 {:+.5})", c.c, c.c1, c.c2);
    }

    println!("common reservoir without hopping:");
    for e in [0.1, 1.0, 3.0] {
        let p = SystemParams::collective(1.0, 0.0, e, 0.2, 0.01)?;
        println!("  eps = {e}: c1 = {:.6}", concurrence_analytic_collective(&p)?.c1);
    }
    Ok(())
}
