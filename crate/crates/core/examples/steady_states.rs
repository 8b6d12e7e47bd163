//! Closed-form and linear-solve steady states in each damping regime.

use modecoupler::steadystate::{analytic, classify, numeric_steady};
use modecoupler::SystemParams;

fn main() -> modecoupler::Result<()> {
    let sets = [
        ("separate reservoirs", SystemParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.0)?),
        ("partial cross damping", SystemParams::new(1.0, 0.3, 0.8, 0.4, 0.1, 0.1)?),
        ("common reservoir", SystemParams::collective(1.0, 0.3, 0.8, 0.4, 0.1)?),
        ("common reservoir, no hopping", SystemParams::collective(1.0, 0.0, 0.8, 0.4, 0.1)?),
    ];
    for (label, p) in sets {
        let a = analytic(&p, None)?;
        let n = numeric_steady(&p, None)?;
        let r = a.rho;
        println!("{label} [{}]", classify(&p));
        println!("  populations {:.6} {:.6} {:.6} {:.6}", r.p11, r.p22, r.p33, r.p44);
        println!("  |rho23| = {:.6}  |rho14| = {:.6}", r.rho23.norm(), r.rho14.norm());
        println!("  linear solve differs by {:.1e}", a.rho.max_abs_diff(&n.rho));
    }

    // without the pair-creation term the vacuum is the steady state
    let rwa = SystemParams::new(1.0, 0.5, 0.0, 0.3, 0.2, 0.1)?;
    println!("eps = 0: rho11 = {}", analytic(&rwa, None)?.rho.p11);
    Ok(())
}
