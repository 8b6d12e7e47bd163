//! Fixed-step time integration of the linear, element-wise and reduced
//! systems, and the truncated Fock-space oracle in [`fock`].

pub mod fock;

use std::io;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liouvillian::{element_rhs, pack, unpack, LinearSystem, ReducedSystem, Vec7};
use crate::params::SystemParams;
use crate::statespace::{from_bd, XDensityMatrix, X_STATE_COLUMNS};

/// Largest step accepted by the integrators, relative to the fastest rate.
pub const STEP_SAFETY: f64 = 0.05;

/// `0.05 / max(ω, κ, ε, γ0)`.
pub fn step_bound(params: &SystemParams) -> f64 {
    let fastest = [params.omega(), params.kappa(), params.epsilon(), params.gamma0()]
        .into_iter()
        .fold(0.0, f64::max);
    STEP_SAFETY / fastest
}

/// States that RK4 can advance: `self + a·other`.
pub trait Axpy: Sized {
    fn axpy(&self, a: f64, other: &Self) -> Self;
}

impl Axpy for Vec7 {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + other * a
    }
}

impl Axpy for DMatrix<Complex64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + other * Complex64::new(a, 0.0)
    }
}

impl Axpy for XDensityMatrix {
    fn axpy(&self, a: f64, o: &Self) -> Self {
        XDensityMatrix {
            p11: self.p11 + a * o.p11,
            p22: self.p22 + a * o.p22,
            p33: self.p33 + a * o.p33,
            p44: self.p44 + a * o.p44,
            rho23: self.rho23 + o.rho23 * a,
            rho14: self.rho14 + o.rho14 * a,
        }
    }
}

/// One classical fourth-order Runge–Kutta step of `dy/dt = f(t, y)`.
pub fn rk4_step<S: Axpy>(f: impl Fn(f64, &S) -> S, t: f64, y: &S, h: f64) -> S {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k2));
    let k4 = f(t + h, &y.axpy(h, &k3));
    y.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

/// Step size, sampling and early stopping for the fixed-step integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    /// Requested step; the actual step is `t_end / ceil(t_end / dt)`.
    pub dt: f64,
    /// Keep every `record_every`-th step (the initial and final states are
    /// always kept).
    pub record_every: usize,
    /// Stop once `‖dY/dt‖∞` falls below this value.
    pub stop_tol: Option<f64>,
}

impl Integrator {
    pub fn new(dt: f64) -> Self {
        Integrator { dt, record_every: 1, stop_tol: None }
    }

    /// Records roughly `samples` evenly spaced states over `[0, t_end]`.
    pub fn sampled(dt: f64, t_end: f64, samples: usize) -> Self {
        let steps = step_count(t_end, dt);
        Integrator { dt, record_every: (steps / samples.max(1)).max(1), stop_tol: None }
    }

    pub fn with_stop_tol(mut self, tol: f64) -> Self {
        self.stop_tol = Some(tol);
        self
    }

    fn plan(&self, params: &SystemParams, t_end: f64) -> Result<(usize, f64)> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::domain("t_end", format!("must be finite and positive, got {t_end}")));
        }
        let bound = step_bound(params);
        if !(self.dt > 0.0) || self.dt > bound * (1.0 + 1e-12) {
            return Err(Error::StepSize { dt: self.dt, bound });
        }
        let n = step_count(t_end, self.dt);
        Ok((n, t_end / n as f64))
    }
}

fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Sampled trajectory of X-states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<XDensityMatrix>,
    pub params: SystemParams,
    /// Step actually used.
    pub dt: f64,
    pub method: &'static str,
}

impl Trajectory {
    pub fn last(&self) -> &XDensityMatrix {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold at least the initial state")
    }

    pub fn write_csv<W: io::Write>(&self, out: W, fmt_num: impl Fn(f64) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time"];
        header.extend(X_STATE_COLUMNS);
        w.write_record(&header)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut rec = vec![fmt_num(*t)];
            rec.extend(s.csv_values().iter().map(|v| fmt_num(*v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shared driver: advances `y`, records via `view`, optionally stops early.
#[allow(clippy::too_many_arguments)]
fn drive<S: Axpy + Clone>(
    rhs: impl Fn(f64, &S) -> S,
    residual: impl Fn(&S) -> f64,
    finite: impl Fn(&S) -> bool,
    view: impl Fn(&S) -> XDensityMatrix,
    y0: S,
    n: usize,
    h: f64,
    opts: &Integrator,
) -> Result<(Vec<f64>, Vec<XDensityMatrix>)> {
    let every = opts.record_every.max(1);
    let mut times = vec![0.0];
    let mut states = vec![view(&y0)];
    let mut y = y0;
    for k in 1..=n {
        let t_prev = (k - 1) as f64 * h;
        y = rk4_step(&rhs, t_prev, &y, h);
        let t = k as f64 * h;
        if !finite(&y) {
            return Err(Error::NonFinite { t });
        }
        let stop = opts.stop_tol.is_some_and(|tol| residual(&y) < tol);
        if k % every == 0 || k == n || stop {
            times.push(t);
            states.push(view(&y));
        }
        if stop {
            break;
        }
    }
    Ok((times, states))
}

/// Integrates `dY/dt = M Y + P` from `y0` with classical RK4.
pub fn integrate_linear(sys: &LinearSystem, y0: &Vec7, t_end: f64, opts: &Integrator) -> Result<Trajectory> {
    let (n, h) = opts.plan(&sys.params, t_end)?;
    let (times, states) = drive(
        |_, y: &Vec7| sys.rhs(y),
        |y| sys.rhs(y).amax(),
        |y| y.iter().all(|v| v.is_finite()),
        unpack,
        *y0,
        n,
        h,
        opts,
    )?;
    Ok(Trajectory { times, states, params: sys.params, dt: h, method: "rk4-linear" })
}

/// Integrates the element-wise equations directly on X-states.
pub fn integrate_elementwise(
    params: &SystemParams,
    rho0: &XDensityMatrix,
    t_end: f64,
    opts: &Integrator,
) -> Result<Trajectory> {
    let (n, h) = opts.plan(params, t_end)?;
    let (times, states) = drive(
        |_, r: &XDensityMatrix| element_rhs(params, r),
        |r| pack(&element_rhs(params, r)).amax(),
        |r| r.csv_values().iter().all(|v| v.is_finite()),
        |r| *r,
        *rho0,
        n,
        h,
        opts,
    )?;
    Ok(Trajectory { times, states, params: *params, dt: h, method: "rk4-elementwise" })
}

/// Integrates the bright/dark system and reports states in the product basis.
pub fn integrate_reduced(sys: &ReducedSystem, z0: &Vec7, t_end: f64, opts: &Integrator) -> Result<Trajectory> {
    let (n, h) = opts.plan(&sys.params, t_end)?;
    let (ga, gb) = (sys.params.gamma_a(), sys.params.gamma_b());
    let view = |z: &Vec7| {
        from_bd(&ReducedSystem::unpack(z), ga, gb).expect("reduced systems have positive damping")
    };
    let (times, states) = drive(
        |_, z: &Vec7| sys.rhs(z),
        |z| sys.rhs(z).amax(),
        |z| z.iter().all(|v| v.is_finite()),
        view,
        *z0,
        n,
        h,
        opts,
    )?;
    Ok(Trajectory { times, states, params: sys.params, dt: h, method: "rk4-reduced" })
}

/// Slowest non-zero relaxation rate `min |Re λ|` of `M`.
pub fn slowest_rate(sys: &LinearSystem) -> Option<f64> {
    let eig = sys.eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    eig.iter()
        .map(|z| z.re.abs())
        .filter(|r| *r > 1e-10 * scale)
        .min_by(f64::total_cmp)
}

/// Horizon after which the slowest mode has decayed by `e^{-50}`.
pub fn default_horizon(sys: &LinearSystem) -> Result<f64> {
    slowest_rate(sys)
        .map(|r| 50.0 / r)
        .ok_or_else(|| Error::SingularRegime("no relaxing mode: the system has no damping".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::build_reduced;
    use crate::statespace::to_bd;
    use crate::steadystate::{analytic, analytic_balanced_max, numeric_steady};
    use proptest::prelude::*;

    fn vacuum_y() -> Vec7 {
        pack(&XDensityMatrix::vacuum())
    }

    #[test]
    fn step_guard() {
        let p = SystemParams::new(1.0, 2.0, 0.5, 0.1, 0.1, 0.0).unwrap();
        assert_eq!(step_bound(&p), 0.025);
        let sys = LinearSystem::build(&p);
        let err = integrate_linear(&sys, &vacuum_y(), 1.0, &Integrator::new(0.03)).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
        assert!(integrate_linear(&sys, &vacuum_y(), 1.0, &Integrator::new(-0.01)).is_err());
        assert!(integrate_linear(&sys, &vacuum_y(), 1.0, &Integrator::new(0.025)).is_ok());
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        let p = SystemParams::new(1.0, 0.4, 0.9, 0.3, 0.1, 0.1).unwrap();
        let sys = LinearSystem::build(&p);
        let y = pack(&numeric_steady(&p, None).unwrap().rho);
        let traj = integrate_linear(&sys, &y, 5.0, &Integrator::new(0.01)).unwrap();
        for s in &traj.states {
            assert!(pack(s).metric_distance(&y) < 1e-10);
        }
    }

    #[test]
    fn vacuum_relaxes_to_analytic_state() {
        let p = SystemParams::new(1.0, 0.4, 0.9, 0.5, 0.2, 0.2).unwrap();
        let sys = LinearSystem::build(&p);
        let traj = integrate_linear(&sys, &vacuum_y(), 50.0 / p.gamma0(), &Integrator::new(0.02)).unwrap();
        let target = analytic(&p, None).unwrap().rho;
        assert!(traj.last().max_abs_diff(&target) < 1e-6);
        assert_eq!(traj.times.len(), traj.states.len());
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert!((traj.final_time() - 50.0 / p.gamma0()).abs() < 1e-9);
    }

    #[test]
    fn dark_population_is_frozen() {
        let p = SystemParams::new(1.0, 0.3, 0.6, 0.4, 0.4, 0.4).unwrap();
        let sys = LinearSystem::build(&p);
        let start = analytic_balanced_max(&p, 0.5).unwrap().rho;
        // perturb away from the stationary point while keeping ρdd = 0.5
        let rho0 = XDensityMatrix { p11: start.p11 + 0.05, p44: start.p44 - 0.05, ..start };
        let traj = integrate_linear(&sys, &pack(&rho0), 40.0, &Integrator::new(0.01)).unwrap();
        for s in &traj.states {
            assert!((to_bd(s, 0.4, 0.4).unwrap().p_dd - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn early_stop_and_sampling() {
        let p = SystemParams::new(1.0, 0.4, 0.9, 0.5, 0.2, 0.2).unwrap();
        let sys = LinearSystem::build(&p);
        let opts = Integrator::new(0.02).with_stop_tol(1e-10);
        let traj = integrate_linear(&sys, &vacuum_y(), 1e4, &opts).unwrap();
        assert!(traj.final_time() < 1e4);
        assert!(sys.rhs(&pack(traj.last())).amax() < 1e-10);

        let opts = Integrator::sampled(0.01, 20.0, 100);
        let traj = integrate_linear(&sys, &vacuum_y(), 20.0, &opts).unwrap();
        assert_eq!(traj.states.len(), 101);
    }

    #[test]
    fn fourth_order_convergence() {
        let p = SystemParams::new(1.0, 0.4, 0.9, 0.5, 0.2, 0.2).unwrap();
        let sys = LinearSystem::build(&p);
        let reference = integrate_linear(&sys, &vacuum_y(), 4.0, &Integrator::new(0.0025)).unwrap();
        let err = |dt: f64| {
            let t = integrate_linear(&sys, &vacuum_y(), 4.0, &Integrator::new(dt)).unwrap();
            t.last().max_abs_diff(reference.last())
        };
        let ratio = err(0.04) / err(0.02);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn default_horizon_skips_conserved_mode() {
        let p = SystemParams::new(1.0, 0.3, 0.6, 0.4, 0.4, 0.4).unwrap();
        let h = default_horizon(&LinearSystem::build(&p)).unwrap();
        assert!(h.is_finite() && h > 0.0);
        let q = SystemParams::new(1.0, 0.3, 0.6, 0.0, 0.0, 0.0).unwrap();
        assert!(default_horizon(&LinearSystem::build(&q)).is_err());
    }

    #[test]
    fn csv_output() {
        let p = SystemParams::new(1.0, 0.4, 0.9, 0.5, 0.2, 0.2).unwrap();
        let traj = integrate_linear(&LinearSystem::build(&p), &vacuum_y(), 0.1, &Integrator::new(0.05)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, |v| format!("{v}")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,p11,p22,p33,p44,re_rho23"));
        assert_eq!(text.lines().count(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn elementwise_and_matrix_trajectories_agree(
            w in 0.2f64..2.0, k in 0.0f64..1.5, e in 0.0f64..1.5,
            ga in 0.0f64..1.0, gb in 0.0f64..1.0, f in 0.0f64..=1.0,
        ) {
            let p = SystemParams::new(w, k, e, ga, gb, (ga * gb).sqrt() * f).unwrap();
            let opts = Integrator::new(step_bound(&p));
            let a = integrate_linear(&LinearSystem::build(&p), &vacuum_y(), 5.0, &opts).unwrap();
            let b = integrate_elementwise(&p, &XDensityMatrix::vacuum(), 5.0, &opts).unwrap();
            for (x, y) in a.states.iter().zip(&b.states) {
                prop_assert!(x.max_abs_diff(y) < 1e-12);
                prop_assert!((x.trace() - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn reduced_and_full_trajectories_agree(
            w in 0.2f64..2.0, k in 0.0f64..1.5, e in 0.0f64..1.5, g0 in 0.05f64..1.0, pdd0 in 0.0f64..1.0,
        ) {
            let p = SystemParams::collective(w, k, e, g0, g0).unwrap();
            let start = XDensityMatrix {
                p11: 1.0 - pdd0,
                p22: 0.5 * pdd0,
                p33: 0.5 * pdd0,
                rho23: Complex64::new(-0.5 * pdd0, 0.0),
                ..XDensityMatrix::vacuum()
            };
            let opts = Integrator::new(step_bound(&p));
            let full = integrate_linear(&LinearSystem::build(&p), &pack(&start), 5.0, &opts).unwrap();
            let red = build_reduced(&p).unwrap();
            let z0 = ReducedSystem::pack(&to_bd(&start, g0, g0).unwrap());
            let reduced = integrate_reduced(&red, &z0, 5.0, &opts).unwrap();
            for (x, y) in full.states.iter().zip(&reduced.states) {
                prop_assert!(x.max_abs_diff(y) < 1e-9);
            }
        }
    }
}
