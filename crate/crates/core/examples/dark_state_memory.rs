//! Balanced decay into a common reservoir: the dark state never relaxes, so
//! the steady state depends on how much of it was there at the start.

use modecoupler::dynamics::{integrate_reduced, step_bound, Integrator};
use modecoupler::liouvillian::{build_reduced, ReducedSystem};
use modecoupler::observables::{concurrence, visibility_from_state};
use modecoupler::statespace::{to_bd, BdDensity};
use modecoupler::steadystate::analytic_balanced_max;
use modecoupler::{SystemParams, XDensityMatrix};

fn main() -> modecoupler::Result<()> {
    let g = 0.5;
    let p = SystemParams::new(1.0, 0.3, 0.7, g, g, g)?;
    let reduced = build_reduced(&p)?;
    let vac = to_bd(&XDensityMatrix::vacuum(), g, g)?;
    for pdd0 in [0.0, 0.3, 1.0] {
        let z0 = ReducedSystem::pack(&BdDensity { p11: 1.0 - pdd0, p_dd: pdd0, ..vac });
        let traj = integrate_reduced(&reduced, &z0, 200.0, &Integrator::new(step_bound(&p)))?;
        let end = traj.last();
        let closed = analytic_balanced_max(&p, pdd0)?.rho;
        println!(
            "pdd0 = {pdd0}: rho_dd(end) = {:.12}, V = {:.6}, C = {:.6}, vs closed form {:.1e}",
            to_bd(end, g, g)?.p_dd,
            visibility_from_state(end)?,
            concurrence(end).c,
            end.max_abs_diff(&closed)
        );
    }
    Ok(())
}
