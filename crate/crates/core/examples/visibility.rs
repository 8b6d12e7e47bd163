//! Interference fringes and first-order visibility.

use modecoupler::observables::{
    fringe_extrema, intensity, visibility_analytic, visibility_common, visibility_from_state, visibility_separate,
    InterferenceConfig,
};
use modecoupler::steadystate::analytic;
use modecoupler::SystemParams;

fn main() -> modecoupler::Result<()> {
    let p = SystemParams::new(1.0, 0.5, 0.3, 2.0, 0.0, 0.0)?;
    let rho = analytic(&p, None)?.rho;
    for k in 0..8 {
        let phase = k as f64 * std::f64::consts::PI / 4.0;
        let i = intensity(&rho, &InterferenceConfig::new(1.0, phase)?);
        println!("phase {phase:.3}: I = {i:.6}");
    }
    let (lo, hi) = fringe_extrema(&rho, 1.0);
    println!("(Imax - Imin)/(Imax + Imin) = {:.6}", (hi - lo) / (hi + lo));
    println!("from the state {:.6}, closed form {:.6}", visibility_from_state(&rho)?, visibility_analytic(&p, None)?);

    println!("separate reservoirs, |u| = 1:");
    for r in [0.1, 0.25, 0.5, 1.0, 2.0] {
        println!("  R = {r}: V = {:.4}", visibility_separate(r, 1.0));
    }
    println!("common reservoir, R = 0:");
    for u in [0.9, 0.5, 0.1] {
        println!("  u = {u}: V = {:.4}", visibility_common(0.0, u));
    }
    let balanced = SystemParams::new(1.0, 0.2, 0.9, 0.3, 0.3, 0.3)?;
    for pdd0 in [0.0, 0.5, 1.0] {
        println!("balanced common reservoir, pdd0 = {pdd0}: V = {:.6}", visibility_analytic(&balanced, Some(pdd0))?);
    }
    Ok(())
}
