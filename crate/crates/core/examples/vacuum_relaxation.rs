//! Relaxation from the vacuum, integrated three ways.

use modecoupler::dynamics::{default_horizon, integrate_elementwise, integrate_linear, step_bound, Integrator};
use modecoupler::liouvillian::{pack, LinearSystem};
use modecoupler::steadystate::analytic;
use modecoupler::{SystemParams, XDensityMatrix};

fn main() -> modecoupler::Result<()> {
    let p = SystemParams::new(1.0, 0.3, 0.8, 0.4, 0.1, 0.1)?;
    let sys = LinearSystem::build(&p);
    let t_end = default_horizon(&sys)?;
    let opts = Integrator::sampled(step_bound(&p), t_end, 10);

    let linear = integrate_linear(&sys, &pack(&XDensityMatrix::vacuum()), t_end, &opts)?;
    let direct = integrate_elementwise(&p, &XDensityMatrix::vacuum(), t_end, &opts)?;
    println!("{:>10} {:>12} {:>12} {:>12}", "t", "rho11", "rho44", "|rho14|");
    for (t, s) in linear.times.iter().zip(&linear.states) {
        println!("{t:>10.3} {:>12.8} {:>12.8} {:>12.8}", s.p11, s.p44, s.rho14.norm());
    }
    let target = analytic(&p, None)?.rho;
    println!("matrix vs element-wise: {:.1e}", linear.last().max_abs_diff(direct.last()));
    println!("final vs steady state:  {:.1e}", linear.last().max_abs_diff(&target));

    let early = integrate_linear(&sys, &pack(&XDensityMatrix::vacuum()), t_end, &opts.with_stop_tol(1e-10))?;
    println!("with stop tolerance 1e-10 the run ends at t = {:.1}", early.final_time());
    Ok(())
}
