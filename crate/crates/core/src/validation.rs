//! Self-checks behind the `validate` command: closed forms against the
//! linear solve, the truncated Fock-space master equation against the
//! seven-variable system, and the separate-reservoir visibility bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::fock::{evolve_fock, FockState};
use crate::dynamics::{integrate_linear, step_bound, Integrator};
use crate::error::Result;
use crate::liouvillian::{pack, LinearSystem};
use crate::observables::visibility_separate;
use crate::params::SystemParams;
use crate::statespace::XDensityMatrix;
use crate::steadystate::{analytic, classify, numeric_steady, Regime};

pub const DEFAULT_SEED: u64 = 42;
pub const RATE_RANGE: (f64, f64) = (1e-3, 2.0);

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// ω = 1 and every other rate log-uniform over [`RATE_RANGE`], redrawing
/// until γ² ≤ γA γB and the point falls in the general regime.
pub fn random_regular_params(rng: &mut impl Rng) -> SystemParams {
    let (lo, hi) = RATE_RANGE;
    loop {
        let mut draw = || log_uniform(rng, lo, hi);
        let (k, e, ga, gb, g) = (draw(), draw(), draw(), draw(), draw());
        if g * g > ga * gb {
            continue;
        }
        if let Ok(p) = SystemParams::new(1.0, k, e, ga, gb, g) {
            if classify(&p) == Regime::General {
                return p;
            }
        }
    }
}

/// Largest deviations between the Fock-space and seven-variable
/// trajectories from the vacuum, over the shared sample times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    pub samples: usize,
    pub populations: f64,
    pub rho23: f64,
    pub abs_rho14: f64,
    /// Largest coherence outside the X pattern seen in the Fock evolution.
    pub off_x: f64,
    /// Smallest eigenvalue seen in the Fock evolution.
    pub min_eigenvalue: f64,
}

impl OracleComparison {
    pub fn worst(&self) -> f64 {
        self.populations.max(self.rho23).max(self.abs_rho14)
    }
}

/// Fraction of the stability bound used by [`oracle_comparison`]; at the
/// bound itself RK4 truncation is around 1e-6.
pub const ORACLE_STEP_FRACTION: f64 = 0.1;

/// Integrates both models on the same fixed grid, `samples` intervals
/// across `[0, t_end]`.
pub fn oracle_comparison(params: &SystemParams, n_max: usize, t_end: f64, samples: usize) -> Result<OracleComparison> {
    let h = ORACLE_STEP_FRACTION * step_bound(params);
    let per_sample = (t_end / (samples as f64 * h)).ceil().max(1.0);
    let dt = t_end / (samples as f64 * per_sample);
    let opts = Integrator::sampled(dt, t_end, samples);
    let sys = LinearSystem::build(params);
    let linear = integrate_linear(&sys, &pack(&XDensityMatrix::vacuum()), t_end, &opts)?;
    let fock = evolve_fock(params, n_max, &FockState::vacuum(n_max), t_end, &opts)?;
    let mut out = OracleComparison {
        samples: linear.times.len(),
        populations: 0.0,
        rho23: 0.0,
        abs_rho14: 0.0,
        off_x: 0.0,
        min_eigenvalue: f64::INFINITY,
    };
    for ((t, x), f) in linear.times.iter().zip(&linear.states).zip(&fock.states) {
        let y = f.to_x(params.omega(), *t);
        for (a, b) in x.populations().iter().zip(y.populations()) {
            out.populations = out.populations.max((a - b).abs());
        }
        out.rho23 = out.rho23.max((x.rho23 - y.rho23).norm());
        out.abs_rho14 = out.abs_rho14.max((x.rho14.norm() - y.rho14.norm()).abs());
        out.off_x = out.off_x.max(f.off_x_magnitude());
        out.min_eigenvalue = out.min_eigenvalue.min(f.min_eigenvalue());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        SuiteResult { name, passed: 0, failed: 0, worst: 0.0, tolerance, failures: vec![] }
    }

    fn record(&mut self, value: f64, label: impl FnOnce() -> String) {
        self.worst = self.worst.max(value);
        if value <= self.tolerance {
            self.passed += 1;
        } else {
            self.failed += 1;
            self.failures.push(format!("{}: {value:e}", label()));
        }
    }

    fn fail(&mut self, label: String) {
        self.failed += 1;
        self.failures.push(label);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }
}

/// Closed forms against the refined linear solve on `draws` random sets.
pub fn steady_suite(seed: u64, draws: usize) -> SuiteResult {
    let mut suite = SuiteResult::new("analytic_vs_numeric", 1e-10);
    let mut rng = seeded_rng(seed);
    for k in 0..draws {
        let p = random_regular_params(&mut rng);
        match (analytic(&p, None), numeric_steady(&p, None)) {
            (Ok(a), Ok(n)) => suite.record(n.rho.max_rel_diff(&a.rho), || format!("draw {k} ({p:?})")),
            (Err(e), _) | (_, Err(e)) => suite.fail(format!("draw {k}: {e}")),
        }
    }
    suite
}

/// Oracle sets spanning separate and common reservoirs.
pub fn oracle_params() -> Vec<SystemParams> {
    let sets = [
        (1.0, 0.3, 0.5, 0.4, 0.1, 0.0),
        (1.0, 1.0, 1.0, 1.0, 1.0, 0.0),
        (1.0, 0.05, 1.5, 0.2, 0.01, 0.0),
        (1.0, 0.3, 0.8, 0.4, 0.1, 0.2),
        (1.0, 0.0, 0.6, 0.2, 0.05, 0.1),
    ];
    sets.iter()
        .map(|&(w, k, e, ga, gb, g)| SystemParams::new(w, k, e, ga, gb, g).expect("valid oracle set"))
        .collect()
}

pub fn oracle_suite() -> SuiteResult {
    let mut suite = SuiteResult::new("fock_oracle_n_max_1", 1e-6);
    for (k, p) in oracle_params().iter().enumerate() {
        match oracle_comparison(p, 1, 20.0, 100) {
            Ok(c) => suite.record(c.worst(), || format!("set {k}")),
            Err(e) => suite.fail(format!("set {k}: {e}")),
        }
    }
    suite
}

/// Separate-reservoir visibility over an `n × n` grid of R ∈ [0, 2],
/// |u| ∈ [0, 1]; records the excess over 1/2.
pub fn visibility_suite(n: usize) -> SuiteResult {
    let mut suite = SuiteResult::new("visibility_bound", 1e-12);
    for i in 0..n {
        for j in 0..n {
            let r = 2.0 * i as f64 / (n - 1) as f64;
            let u = j as f64 / (n - 1) as f64;
            suite.record((visibility_separate(r, u) - 0.5).max(0.0), || format!("R={r}, u={u}"));
        }
    }
    suite
}

pub fn run_validation(seed: u64) -> ValidationReport {
    ValidationReport { seed, suites: vec![steady_suite(seed, 20), oracle_suite(), visibility_suite(64)] }
}
