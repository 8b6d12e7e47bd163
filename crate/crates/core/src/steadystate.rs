//! Stationary states: closed forms per damping regime and a linear solve.

use std::fmt;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouvillian::{dark_population_functional, unpack, LinearSystem, Vec7};
use crate::params::SystemParams;
use crate::statespace::{XDensityMatrix, X_STATE_COLUMNS};

/// Damping regime, deciding which closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    General,
    /// Separate reservoirs, γ = 0.
    Independent,
    /// Common reservoir with γ = sqrt(γA γB), γA ≠ γB, κ > 0.
    CollectiveMax,
    /// γA = γB with γ < γ0.
    BalancedSubcritical,
    /// γA = γB = γ: the dark population is conserved.
    BalancedCollectiveMax,
    /// Common reservoir with γ = sqrt(γA γB), γA ≠ γB and κ = 0.
    TrappedKappa0,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::General => "general",
            Regime::Independent => "independent",
            Regime::CollectiveMax => "collective_max",
            Regime::BalancedSubcritical => "balanced_subcritical",
            Regime::BalancedCollectiveMax => "balanced_collective_max",
            Regime::TrappedKappa0 => "trapped_kappa0",
        }
    }

    pub fn is_singular(self) -> bool {
        self == Regime::BalancedCollectiveMax
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Regime of a parameter set. Exact-regime tests use
/// [`crate::params::REGIME_RTOL`].
pub fn classify(params: &SystemParams) -> Regime {
    let balanced = params.is_balanced();
    let collective = params.is_collective_max();
    if balanced && collective {
        Regime::BalancedCollectiveMax
    } else if params.is_independent() {
        Regime::Independent
    } else if collective {
        if params.kappa() == 0.0 {
            Regime::TrappedKappa0
        } else {
            Regime::CollectiveMax
        }
    } else if balanced {
        Regime::BalancedSubcritical
    } else {
        Regime::General
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStateResult {
    pub rho: XDensityMatrix,
    pub regime: Regime,
    /// Denominator of the closed form that applies to `regime`.
    pub denominator: f64,
    pub singular: bool,
    /// Dark population the state was computed for (singular regime only).
    pub initial_pdd: Option<f64>,
}

/// CSV header matching [`SteadyStateResult::csv_record`].
pub fn steady_csv_header() -> Vec<&'static str> {
    let mut h = vec!["regime", "denominator", "singular", "initial_pdd"];
    h.extend(X_STATE_COLUMNS);
    h
}

impl SteadyStateResult {
    fn regular(rho: XDensityMatrix, regime: Regime, denominator: f64) -> Self {
        SteadyStateResult { rho, regime, denominator, singular: false, initial_pdd: None }
    }

    pub fn csv_record(&self, fmt_num: impl Fn(f64) -> String) -> Vec<String> {
        let mut rec = vec![
            self.regime.label().to_string(),
            fmt_num(self.denominator),
            self.singular.to_string(),
            self.initial_pdd.map(&fmt_num).unwrap_or_default(),
        ];
        rec.extend(self.rho.csv_values().iter().map(|v| fmt_num(*v)));
        rec
    }
}

fn need_damping(params: &SystemParams) -> Result<()> {
    if params.gamma0() > 0.0 {
        Ok(())
    } else {
        Err(Error::SingularRegime(
            "without damping there is no unique steady state".into(),
        ))
    }
}

fn need_positive(denominator: f64, what: &str) -> Result<()> {
    if denominator > 0.0 && denominator.is_finite() {
        Ok(())
    } else {
        Err(Error::SingularRegime(format!(
            "{what} = {denominator}: the steady state is not unique for these parameters"
        )))
    }
}

/// General closed form, valid away from the balanced maximal-collective point.
pub fn analytic_general(params: &SystemParams) -> Result<SteadyStateResult> {
    need_damping(params)?;
    if classify(params) == Regime::BalancedCollectiveMax {
        return Err(Error::SingularRegime(
            "gamma_a = gamma_b = gamma: use the balanced maximal-collective form with an initial dark population".into(),
        ));
    }
    let k = params.kappa();
    let e = params.epsilon();
    let w = params.omega();
    let ga = params.gamma_a();
    let gb = params.gamma_b();
    let g = params.gamma();
    let g0 = params.gamma0();
    let gd = params.gamma_d();
    let root = params.gamma_max();

    // γAγB − γ² and γ0² − γ², arranged to avoid cancellation near γ = sqrt(γAγB)
    let excess = (root - g) * (root + g);
    let x = gd * gd + excess;
    let bracket = 4.0 * k * k * x + g0 * g0 * excess;
    let a = g0 * g0 + 4.0 * w * w;
    let e2 = e * e;
    let d = a * bracket + 4.0 * e2 * x * (g0 * g0 + 4.0 * k * k);
    need_positive(d, "D")?;

    let cross = g * g * gd * gd;
    let rho = XDensityMatrix {
        p11: (a + e2) * bracket / d,
        p22: e2 * ((4.0 * k * k + ga * ga) * x + cross) / d,
        p33: e2 * ((4.0 * k * k + gb * gb) * x + cross) / d,
        p44: e2 * bracket / d,
        rho23: Complex64::new(-2.0 * g0 * g * gd * gd, 4.0 * k * gd * x) * (e2 / d),
        rho14: Complex64::new(-2.0 * w, g0) * (e * bracket / d),
    };
    Ok(SteadyStateResult::regular(rho, classify(params), d))
}

/// Closed form for separate reservoirs (γ = 0).
pub fn analytic_independent(params: &SystemParams) -> Result<SteadyStateResult> {
    need_damping(params)?;
    if !params.is_independent() {
        return Err(Error::domain("gamma", "the independent-reservoir form needs gamma = 0"));
    }
    let k2 = params.kappa() * params.kappa();
    let e = params.epsilon();
    let e2 = e * e;
    let w = params.omega();
    let ga = params.gamma_a();
    let gb = params.gamma_b();
    let g0 = params.gamma0();
    let a = g0 * g0 + 4.0 * w * w;
    let shared = 4.0 * k2 + ga * gb;
    let d0 = shared * a + 4.0 * e2 * (4.0 * k2 + g0 * g0);
    need_positive(d0, "D0")?;
    let rho = XDensityMatrix {
        p11: shared * (a + e2) / d0,
        p22: e2 * (4.0 * k2 + ga * ga) / d0,
        p33: e2 * (4.0 * k2 + gb * gb) / d0,
        p44: e2 * shared / d0,
        rho23: Complex64::new(0.0, 2.0 * (ga - gb) * params.kappa() * e2 / d0),
        rho14: Complex64::new(-2.0 * w, g0) * (e * shared / d0),
    };
    Ok(SteadyStateResult::regular(rho, Regime::Independent, d0))
}

/// Closed form for a common reservoir at maximal cross damping with unequal
/// local rates.
pub fn analytic_collective_max(params: &SystemParams) -> Result<SteadyStateResult> {
    need_damping(params)?;
    if !params.is_collective_max() || params.is_balanced() {
        return Err(Error::domain(
            "gamma",
            "the maximal-collective form needs gamma = sqrt(gamma_a*gamma_b) and gamma_a != gamma_b",
        ));
    }
    let k = params.kappa();
    let k2 = k * k;
    let e = params.epsilon();
    let e2 = e * e;
    let w = params.omega();
    let ga = params.gamma_a();
    let gb = params.gamma_b();
    let g0 = params.gamma0();
    let a = g0 * g0 + 4.0 * w * w;
    let dt = k2 * a + e2 * (g0 * g0 + 4.0 * k2);
    need_positive(dt, "D~")?;
    let rho = XDensityMatrix {
        p11: k2 * (a + e2) / dt,
        p22: e2 * (2.0 * k2 + ga * g0) / (2.0 * dt),
        p33: e2 * (2.0 * k2 + gb * g0) / (2.0 * dt),
        p44: k2 * e2 / dt,
        rho23: Complex64::new(-g0 * params.gamma_max(), k * (ga - gb)) * (e2 / (2.0 * dt)),
        rho14: Complex64::new(-2.0 * w, g0) * (e * k2 / dt),
    };
    let regime = if k == 0.0 { Regime::TrappedKappa0 } else { Regime::CollectiveMax };
    Ok(SteadyStateResult::regular(rho, regime, dt))
}

/// Closed form for equal local rates below maximal cross damping. Independent
/// of κ and γ.
pub fn analytic_balanced(params: &SystemParams) -> Result<SteadyStateResult> {
    need_damping(params)?;
    if !params.is_balanced() || params.is_collective_max() {
        return Err(Error::domain(
            "gamma_a, gamma_b, gamma",
            "the balanced form needs gamma_a = gamma_b and gamma < gamma0",
        ));
    }
    let e = params.epsilon();
    let e2 = e * e;
    let w = params.omega();
    let g0 = params.gamma0();
    let a = g0 * g0 + 4.0 * w * w;
    let dp = a + 4.0 * e2;
    let excited = e2 / dp;
    let rho = XDensityMatrix {
        p11: (a + e2) / dp,
        p22: excited,
        p33: excited,
        p44: excited,
        rho23: Complex64::new(0.0, 0.0),
        rho14: Complex64::new(-2.0 * w, g0) * (e / dp),
    };
    Ok(SteadyStateResult::regular(rho, Regime::BalancedSubcritical, dp))
}

fn check_pdd0(pdd0: f64) -> Result<()> {
    if pdd0.is_finite() && (0.0..=1.0).contains(&pdd0) {
        Ok(())
    } else {
        Err(Error::domain("pdd0", format!("must lie in [0, 1], got {pdd0}")))
    }
}

/// Closed form at γA = γB = γ, where the steady state remembers the initial
/// dark-state population `pdd0`.
pub fn analytic_balanced_max(params: &SystemParams, pdd0: f64) -> Result<SteadyStateResult> {
    need_damping(params)?;
    if classify(params) != Regime::BalancedCollectiveMax {
        return Err(Error::domain(
            "gamma_a, gamma_b, gamma",
            "the balanced maximal-collective form needs gamma_a = gamma_b = gamma",
        ));
    }
    check_pdd0(pdd0)?;
    let e = params.epsilon();
    let e2 = e * e;
    let w = params.omega();
    let g0 = params.gamma0();
    let a = g0 * g0 + 4.0 * w * w;
    let dq = a + 3.0 * e2;
    let rest = 1.0 - pdd0;
    let single = 0.5 * (1.0 - (a + 2.0 * e2) / dq * rest);
    let rho = XDensityMatrix {
        p11: (a + e2) / dq * rest,
        p22: single,
        p33: single,
        p44: e2 / dq * rest,
        rho23: Complex64::new(-0.5 * (1.0 - (a + 4.0 * e2) / dq * rest), 0.0),
        rho14: Complex64::new(-2.0 * w, g0) * (e / dq * rest),
    };
    Ok(SteadyStateResult {
        rho,
        regime: Regime::BalancedCollectiveMax,
        denominator: dq,
        singular: true,
        initial_pdd: Some(pdd0),
    })
}

/// Closed form for whichever regime `params` falls in.
pub fn analytic(params: &SystemParams, pdd0: Option<f64>) -> Result<SteadyStateResult> {
    match classify(params) {
        Regime::BalancedCollectiveMax => {
            analytic_balanced_max(params, pdd0.ok_or(Error::MissingInitialCondition)?)
        }
        Regime::Independent => analytic_independent(params),
        Regime::CollectiveMax | Regime::TrappedKappa0 => analytic_collective_max(params),
        Regime::BalancedSubcritical => analytic_balanced(params),
        Regime::General => analytic_general(params),
    }
}

/// `(s, err)` with `s + err = a + b` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `Σ x_i y_i` evaluated as if in twice the working precision.
fn compensated_dot(x: impl Iterator<Item = f64>, y: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut err = 0.0;
    for (a, b) in x.zip(y) {
        let p = a * b;
        let perr = a.mul_add(b, -p);
        let (s, serr) = two_sum(sum, p);
        sum = s;
        err += serr + perr;
    }
    sum + err
}

/// `target − A·y` with a compensated inner product per row.
fn residual<const R: usize>(
    a: &SMatrix<f64, R, 7>,
    y: &Vec7,
    target: &SVector<f64, R>,
) -> SVector<f64, R> {
    SVector::<f64, R>::from_fn(|r, _| {
        let row = a.row(r);
        let lhs = compensated_dot(
            row.iter().copied().chain(std::iter::once(-1.0)),
            y.iter().copied().chain(std::iter::once(target[r])),
        );
        -lhs
    })
}

const REFINEMENT_ROUNDS: usize = 2;

/// Steady state from the linear system.
///
/// Regular case: `M Y = −P` by LU with two rounds of iterative refinement.
/// The solve starts from the vacuum, so with ε = 0 the result is the vacuum
/// exactly. At γA = γB = γ the system is completed by `ρ_dd = pdd0` and solved
/// in the least-squares sense by SVD.
pub fn numeric_steady(params: &SystemParams, pdd0: Option<f64>) -> Result<SteadyStateResult> {
    need_damping(params)?;
    let sys = LinearSystem::build(params);
    let regime = classify(params);
    let singular = sys.singularity().is_singular();

    if regime == Regime::BalancedCollectiveMax {
        let pdd0 = pdd0.ok_or(Error::MissingInitialCondition)?;
        check_pdd0(pdd0)?;
        let rho = constrained_solve(&sys, params, pdd0)?;
        let denominator = analytic_balanced_max(params, pdd0)?.denominator;
        return Ok(SteadyStateResult { rho, regime, denominator, singular: true, initial_pdd: Some(pdd0) });
    }
    if singular {
        return Err(Error::SingularRegime(format!(
            "the generator is rank deficient for {regime} parameters without a conserved dark population"
        )));
    }

    let lu = sys.m.lu();
    let neg_p = -sys.p;
    let vacuum = Vec7::from([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut y = vacuum
        + lu.solve(&residual(&sys.m, &vacuum, &neg_p))
            .ok_or_else(|| Error::SingularRegime("LU factorization failed".into()))?;
    for _ in 0..REFINEMENT_ROUNDS {
        if let Some(dy) = lu.solve(&residual(&sys.m, &y, &neg_p)) {
            y += dy;
        }
    }
    let mut rho = unpack(&y);
    // ρ̇44 = −2γ0 ρ44 − ε Y7 gives ρ44 without the cancellation of 1 − ρ11 − ρ22 − ρ33.
    rho.p44 = -params.epsilon() * y[6] / (2.0 * params.gamma0()) + 0.0;
    let denominator = analytic(params, None).map(|r| r.denominator).unwrap_or(f64::NAN);
    Ok(SteadyStateResult { rho, regime, denominator, singular: false, initial_pdd: None })
}

fn constrained_solve(sys: &LinearSystem, params: &SystemParams, pdd0: f64) -> Result<XDensityMatrix> {
    let dark = dark_population_functional(params)?;
    let mut a = SMatrix::<f64, 8, 7>::zeros();
    a.fixed_view_mut::<7, 7>(0, 0).copy_from(&sys.m);
    a.set_row(7, &dark.transpose());
    let mut b = SVector::<f64, 8>::zeros();
    b.fixed_rows_mut::<7>(0).copy_from(&(-sys.p));
    b[7] = pdd0;
    let svd = a.svd(true, true);
    let solve = |rhs: &SVector<f64, 8>| {
        svd.solve(rhs, 1e-14)
            .map_err(|e| Error::SingularRegime(format!("constrained solve failed: {e}")))
    };
    let mut y: Vec7 = solve(&b)?;
    for _ in 0..REFINEMENT_ROUNDS {
        y += solve(&residual(&a, &y, &b))?;
    }
    Ok(unpack(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(w: f64, k: f64, e: f64, ga: f64, gb: f64, g: f64) -> SystemParams {
        SystemParams::new(w, k, e, ga, gb, g).unwrap()
    }

    #[test]
    fn unit_independent_values() {
        let p = params(1.0, 1.0, 1.0, 1.0, 1.0, 0.0);
        let r = analytic_independent(&p).unwrap();
        assert_relative_eq!(r.denominator, 45.0, max_relative = 1e-15);
        assert_relative_eq!(r.rho.p11, 2.0 / 3.0, max_relative = 1e-15);
        for v in [r.rho.p22, r.rho.p33, r.rho.p44] {
            assert_relative_eq!(v, 1.0 / 9.0, max_relative = 1e-15);
        }
        assert_eq!(r.rho.rho23, Complex64::new(0.0, 0.0));
        let n = numeric_steady(&p, None).unwrap();
        assert!(n.rho.max_abs_diff(&r.rho) < 1e-15);
    }

    #[test]
    fn rwa_limit_is_exact_vacuum() {
        for p in [
            params(1.0, 0.3, 0.0, 0.2, 0.05, 0.04),
            params(2.0, 1.0, 0.0, 1.0, 1.0, 0.0),
            params(1.0, 0.7, 0.0, 0.2, 0.01, 0.0),
            SystemParams::collective(1.0, 0.5, 0.0, 0.2, 0.01).unwrap(),
        ] {
            assert_eq!(analytic(&p, None).unwrap().rho, XDensityMatrix::vacuum(), "{p:?}");
            assert_eq!(numeric_steady(&p, None).unwrap().rho, XDensityMatrix::vacuum(), "{p:?}");
            if classify(&p) != Regime::BalancedSubcritical {
                assert_eq!(analytic_general(&p).unwrap().rho, XDensityMatrix::vacuum());
            }
        }
    }

    #[test]
    fn independent_coherence_identity_and_inversion() {
        let p = params(1.0, 0.4, 0.9, 0.3, 0.1, 0.0);
        let r = analytic_independent(&p).unwrap().rho;
        let g0 = p.gamma0();
        let lhs = r.rho23;
        let rhs = Complex64::new(0.0, p.kappa() / g0 * (r.p22 - r.p33));
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
        let d0 = analytic_independent(&p).unwrap().denominator;
        assert_relative_eq!(r.p22 - r.p33, 2.0 * 0.81 * g0 * 0.2 / d0, max_relative = 1e-12);
        // printed ratio uses κ² where the closed form gives 4κ²
        let k = p.kappa();
        let (ga, gb) = (p.gamma_a(), p.gamma_b());
        assert_relative_eq!(r.p22 / r.p44, 1.0 + ga * (ga - gb) / (4.0 * k * k + ga * gb), max_relative = 1e-12);
        assert!((r.p22 / r.p44 - (1.0 + ga * (ga - gb) / (k * k + ga * gb))).abs() > 1e-3);
    }

    #[test]
    fn balanced_independent_has_no_coherence() {
        let r = analytic_independent(&params(1.0, 0.4, 0.9, 0.3, 0.3, 0.0)).unwrap();
        assert_eq!(r.rho.rho23.norm(), 0.0);
    }

    #[test]
    fn trapped_limit() {
        let p = SystemParams::collective(1.0, 0.0, 0.8, 0.2, 0.01).unwrap();
        let r = analytic_collective_max(&p).unwrap();
        assert_eq!(r.regime, Regime::TrappedKappa0);
        let g0 = p.gamma0();
        assert_relative_eq!(r.rho.p22, 0.2 / (2.0 * g0), max_relative = 1e-14);
        assert_relative_eq!(r.rho.p33, 0.01 / (2.0 * g0), max_relative = 1e-14);
        assert_relative_eq!(r.rho.rho23.re, -p.gamma_max() / (2.0 * g0), max_relative = 1e-14);
        assert_eq!(r.rho.p11, 0.0);
        assert_eq!(r.rho.p44, 0.0);
    }

    #[test]
    fn collective_ratios_exceed_one() {
        let p = SystemParams::collective(1.0, 0.3, 0.8, 0.2, 0.01).unwrap();
        let r = analytic_collective_max(&p).unwrap().rho;
        let k2 = p.kappa() * p.kappa();
        assert_relative_eq!(r.p22 / r.p44, 1.0 + p.gamma_a() * p.gamma0() / (2.0 * k2), max_relative = 1e-12);
        assert!(r.p33 / r.p44 >= 1.0);
    }

    #[test]
    fn balanced_values_independent_of_kappa_and_gamma() {
        let r = analytic_balanced(&params(1.0, 0.2, 1.0, 1.0, 1.0, 0.3)).unwrap();
        assert_relative_eq!(r.denominator, 9.0);
        assert_relative_eq!(r.rho.p11, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(r.rho.p44, 1.0 / 9.0, max_relative = 1e-15);
        let other = analytic_balanced(&params(1.0, 1.7, 1.0, 1.0, 1.0, 0.9)).unwrap();
        assert_eq!(r.rho, other.rho);
        assert!(analytic_balanced(&params(1.0, 1.7, 1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn balanced_max_values() {
        let p = params(1.0, 0.3, 1.0, 1.0, 1.0, 1.0);
        let r = analytic_balanced_max(&p, 0.0).unwrap();
        assert!(r.singular);
        assert_eq!(r.initial_pdd, Some(0.0));
        assert_relative_eq!(r.rho.p11, 0.75, max_relative = 1e-15);
        assert_relative_eq!(r.rho.p44, 0.125, max_relative = 1e-15);
        assert_relative_eq!(r.rho.p22, 1.0 / 16.0, max_relative = 1e-14);
        assert_relative_eq!(r.rho.rho23.re, 1.0 / 16.0, max_relative = 1e-14);

        let d = analytic_balanced_max(&p, 1.0).unwrap().rho;
        assert_eq!((d.p11, d.p44, d.rho14.norm()), (0.0, 0.0, 0.0));
        assert_eq!((d.p22, d.p33, d.rho23.re), (0.5, 0.5, -0.5));

        let q = params(1.0, 1.9, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(analytic_balanced_max(&q, 0.3).unwrap().rho, analytic_balanced_max(&p, 0.3).unwrap().rho);
        assert!(analytic_balanced_max(&p, 1.5).is_err());
    }

    #[test]
    fn subcritical_form_is_wrong_at_the_singular_point() {
        // the γ < γ0 answer does not extend to γ = γ0
        let below = analytic_balanced(&params(1.0, 0.3, 1.0, 1.0, 1.0, 1.0 - 1e-9)).unwrap();
        let at = analytic_balanced_max(&params(1.0, 0.3, 1.0, 1.0, 1.0, 1.0), 1.0).unwrap();
        assert!(below.rho.max_abs_diff(&at.rho) > 0.1);
    }

    #[test]
    fn singular_regime_needs_pdd0() {
        let p = params(1.0, 0.3, 1.0, 0.01, 0.01, 0.01);
        assert!(matches!(numeric_steady(&p, None), Err(Error::MissingInitialCondition)));
        assert!(matches!(analytic(&p, None), Err(Error::MissingInitialCondition)));
        assert!(matches!(analytic_general(&p), Err(Error::SingularRegime(_))));
        for pdd0 in [0.0, 0.3, 1.0] {
            let n = numeric_steady(&p, Some(pdd0)).unwrap();
            let a = analytic_balanced_max(&p, pdd0).unwrap();
            assert!(n.rho.max_abs_diff(&a.rho) < 1e-12, "{pdd0}: {:?} vs {:?}", n.rho, a.rho);
        }
    }

    #[test]
    fn undamped_or_degenerate_is_singular() {
        assert!(numeric_steady(&params(1.0, 0.3, 1.0, 0.0, 0.0, 0.0), None).is_err());
        assert!(analytic(&params(1.0, 0.3, 1.0, 0.0, 0.0, 0.0), None).is_err());
        let trapped_dark = SystemParams::collective(1.0, 0.0, 0.0, 0.2, 0.01).unwrap();
        assert!(matches!(analytic(&trapped_dark, None), Err(Error::SingularRegime(_))));
        assert!(matches!(numeric_steady(&trapped_dark, None), Err(Error::SingularRegime(_))));
    }

    #[test]
    fn collective_denominator_identity() {
        let p = SystemParams::collective(1.3, 0.4, 0.7, 0.5, 0.1).unwrap();
        let d = analytic_general(&p).unwrap().denominator;
        let dt = analytic_collective_max(&p).unwrap().denominator;
        let gd = p.gamma_d();
        assert_relative_eq!(4.0 * gd * gd * dt, d, max_relative = 1e-13);
    }

    #[test]
    fn regime_labels() {
        assert_eq!(classify(&params(1.0, 1.0, 1.0, 0.3, 0.1, 0.1)), Regime::General);
        assert_eq!(classify(&params(1.0, 1.0, 1.0, 0.3, 0.3, 0.0)), Regime::Independent);
        assert_eq!(classify(&params(1.0, 1.0, 1.0, 0.3, 0.3, 0.1)), Regime::BalancedSubcritical);
        assert_eq!(classify(&params(1.0, 1.0, 1.0, 0.3, 0.3, 0.3)), Regime::BalancedCollectiveMax);
        assert_eq!(classify(&SystemParams::collective(1.0, 1.0, 1.0, 0.3, 0.1).unwrap()), Regime::CollectiveMax);
        assert_eq!(classify(&SystemParams::collective(1.0, 0.0, 1.0, 0.3, 0.1).unwrap()), Regime::TrappedKappa0);
    }

    #[test]
    fn csv_record_shape() {
        let r = analytic(&params(1.0, 1.0, 1.0, 0.3, 0.1, 0.1), None).unwrap();
        let rec = r.csv_record(|v| format!("{v}"));
        assert_eq!(rec.len(), steady_csv_header().len());
        assert_eq!(rec[0], "general");
        assert_eq!(rec[3], "");
    }

    #[test]
    fn compensated_dot_is_exact_on_cancellation() {
        let x = [1e16, 1.0, -1e16];
        let y = [1.0, 1.0, 1.0];
        assert_eq!(compensated_dot(x.into_iter(), y.into_iter()), 1.0);
    }

    fn arb_regular() -> impl Strategy<Value = SystemParams> {
        let lu = || (-3.0f64..0.3).prop_map(f64::exp);
        (lu(), lu(), lu(), lu(), lu(), 0.0f64..0.999).prop_map(|(w, k, e, ga, gb, f)| {
            SystemParams::new(w, k, e, ga, gb, (ga * gb).sqrt() * f).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn analytic_matches_numeric(p in arb_regular()) {
            let a = analytic_general(&p).unwrap();
            let n = numeric_steady(&p, None).unwrap();
            prop_assert!(n.rho.max_rel_diff(&a.rho) < 1e-10, "{:?}\n{:?}", a.rho, n.rho);
        }

        #[test]
        fn analytic_states_are_physical(p in arb_regular()) {
            let r = analytic(&p, None).unwrap();
            prop_assert!(r.denominator > 0.0);
            prop_assert!((r.rho.trace() - 1.0).abs() < 1e-12);
            prop_assert!(r.rho.single_block_margin() >= -1e-12);
            prop_assert!(r.rho.outer_block_margin() >= -1e-12);
        }

        #[test]
        fn general_reduces_to_special_forms(
            w in 0.1f64..2.0, k in 0.0f64..2.0, e in 0.0f64..2.0, ga in 1e-3f64..2.0, gb in 1e-3f64..2.0,
        ) {
            let indep = SystemParams::new(w, k, e, ga, gb, 0.0).unwrap();
            let g = analytic_general(&indep).unwrap().rho;
            prop_assert!(g.max_rel_diff(&analytic_independent(&indep).unwrap().rho) < 1e-12);
            prop_assume!((ga - gb).abs() > 1e-6 && k > 1e-6);
            let coll = SystemParams::collective(w, k, e, ga, gb).unwrap();
            let g = analytic_general(&coll).unwrap().rho;
            prop_assert!(g.max_rel_diff(&analytic_collective_max(&coll).unwrap().rho) < 1e-12);
        }
    }
}
