//! Quantities derived from an X-state: interference fringes, concurrence,
//! zero-delay photon correlations, photon numbers and population ratios.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::statespace::XDensityMatrix;
use crate::steadystate::{classify, Regime};

/// Detector response and the combined geometric/phase offset of the two
/// fields at the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceConfig {
    pub detector_constant: f64,
    /// Radians.
    pub phase: f64,
}

impl Default for InterferenceConfig {
    fn default() -> Self {
        InterferenceConfig { detector_constant: 1.0, phase: 0.0 }
    }
}

impl InterferenceConfig {
    pub fn new(detector_constant: f64, phase: f64) -> Result<Self> {
        if !(detector_constant > 0.0) || !detector_constant.is_finite() {
            return Err(Error::domain("detector_constant", "must be finite and positive"));
        }
        if !phase.is_finite() {
            return Err(Error::domain("phase", "must be finite"));
        }
        Ok(InterferenceConfig { detector_constant, phase })
    }
}

fn photon_sum(rho: &XDensityMatrix) -> f64 {
    2.0 * rho.p44 + rho.p22 + rho.p33
}

/// Detected intensity `C [n_A + n_B + 2 Re(⟨a_A† a_B⟩ e^{iφ})]`, where
/// `⟨a_A† a_B⟩ = ρ23`.
pub fn intensity(rho: &XDensityMatrix, cfg: &InterferenceConfig) -> f64 {
    let fringe = rho.rho23 * num_complex::Complex64::from_polar(1.0, cfg.phase);
    cfg.detector_constant * (photon_sum(rho) + 2.0 * fringe.re)
}

/// `(I_min, I_max)` over all phases.
pub fn fringe_extrema(rho: &XDensityMatrix, detector_constant: f64) -> (f64, f64) {
    let mean = photon_sum(rho);
    let swing = 2.0 * rho.rho23.norm();
    (detector_constant * (mean - swing), detector_constant * (mean + swing))
}

/// First-order visibility `2|ρ23| / (2ρ44 + ρ22 + ρ33)`.
pub fn visibility_from_state(rho: &XDensityMatrix) -> Result<f64> {
    let denom = photon_sum(rho);
    if !(denom > 0.0) {
        return Err(Error::domain("state", "visibility is undefined without photons"));
    }
    Ok(2.0 * rho.rho23.norm() / denom)
}

/// Visibility for separate reservoirs in terms of `R = κ/γ0`, `u = γd/γ0`.
pub fn visibility_separate(ratio_r: f64, ratio_u: f64) -> f64 {
    ratio_u.abs() * 2.0 * ratio_r / (4.0 * ratio_r * ratio_r + 1.0)
}

/// Visibility for a common reservoir at maximal cross damping.
pub fn visibility_common(ratio_r: f64, ratio_u: f64) -> f64 {
    let r2 = ratio_r * ratio_r;
    let u2 = ratio_u * ratio_u;
    (4.0 * r2 * u2 + 1.0 - u2).sqrt() / (4.0 * r2 + 1.0)
}

/// Visibility at γA = γB = γ for initial dark population `pdd0`.
pub fn visibility_dark_memory(params: &SystemParams, pdd0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&pdd0) {
        return Err(Error::domain("pdd0", format!("must lie in [0, 1], got {pdd0}")));
    }
    let e2 = params.epsilon() * params.epsilon();
    let g0 = params.gamma0();
    let a = g0 * g0 + 4.0 * params.omega() * params.omega();
    let denom = 3.0 * e2 + a * pdd0;
    if !(denom > 0.0) {
        return Err(Error::domain("state", "visibility is undefined without photons"));
    }
    Ok((e2 - (4.0 * e2 + a) * pdd0).abs() / denom)
}

/// Steady-state visibility from the closed form of the parameters' regime.
pub fn visibility_analytic(params: &SystemParams, pdd0: Option<f64>) -> Result<f64> {
    let regime = classify(params);
    if regime == Regime::BalancedCollectiveMax {
        return visibility_dark_memory(params, pdd0.ok_or(Error::MissingInitialCondition)?);
    }
    let d = params.derive()?;
    match regime {
        Regime::Independent => Ok(visibility_separate(d.ratio_r, d.ratio_u)),
        Regime::CollectiveMax | Regime::TrappedKappa0 => Ok(visibility_common(d.ratio_r, d.ratio_u)),
        Regime::BalancedSubcritical => Err(Error::domain(
            "gamma_a, gamma_b",
            "the general visibility formula is only valid for gamma_a != gamma_b",
        )),
        Regime::General => {
            let k = params.kappa();
            let g = params.gamma();
            let g0 = d.gamma0;
            let gd = d.gamma_d;
            let root = params.gamma_max();
            let x = gd * gd + (root - g) * (root + g);
            let num = (4.0 * k * k * x * x + (g * g0 * gd).powi(2)).sqrt();
            Ok(gd.abs() * num / ((4.0 * k * k + g0 * g0) * x))
        }
        Regime::BalancedCollectiveMax => unreachable!("handled above"),
    }
}

/// Concurrence of an X-state together with its two branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub c: f64,
    /// One-photon branch `2(|ρ23| − √(ρ11ρ44))`.
    pub c1: f64,
    /// Two-photon branch `2(|ρ14| − √(ρ22ρ33))`.
    pub c2: f64,
}

impl ConcurrenceResult {
    pub fn from_branches(c1: f64, c2: f64) -> Self {
        ConcurrenceResult { c: 0.0f64.max(c1).max(c2), c1, c2 }
    }
}

pub fn concurrence(rho: &XDensityMatrix) -> ConcurrenceResult {
    let c1 = 2.0 * (rho.rho23.norm() - (rho.p11 * rho.p44).max(0.0).sqrt());
    let c2 = 2.0 * (rho.rho14.norm() - (rho.p22 * rho.p33).max(0.0).sqrt());
    ConcurrenceResult::from_branches(c1, c2)
}

/// Steady-state concurrence for separate reservoirs (γ = 0).
pub fn concurrence_analytic_independent(params: &SystemParams) -> Result<ConcurrenceResult> {
    if !params.is_independent() {
        return Err(Error::domain("gamma", "this concurrence form needs gamma = 0"));
    }
    let k2 = params.kappa() * params.kappa();
    let e = params.epsilon();
    let w2 = params.omega() * params.omega();
    let ga = params.gamma_a();
    let gb = params.gamma_b();
    let g0 = params.gamma0();
    let gd = params.gamma_d();
    let shared = 4.0 * k2 + ga * gb;
    let d0 = shared * (4.0 * w2 + g0 * g0) + 4.0 * e * e * (4.0 * k2 + g0 * g0);
    if !(d0 > 0.0) {
        return Err(Error::SingularRegime("D0 vanishes: no unique steady state".into()));
    }
    let pre = 2.0 * e / d0;
    let c1 = pre * (4.0 * gd.abs() * params.kappa() * e - shared * (4.0 * w2 + e * e + g0 * g0).sqrt());
    let c2 = pre
        * (shared * (4.0 * w2 + g0 * g0).sqrt()
            - e * ((4.0 * k2 + ga * ga) * (4.0 * k2 + gb * gb)).sqrt());
    Ok(ConcurrenceResult::from_branches(c1, c2))
}

/// Steady-state concurrence for a common reservoir at γ = sqrt(γA γB),
/// γA ≠ γB.
pub fn concurrence_analytic_collective(params: &SystemParams) -> Result<ConcurrenceResult> {
    if !params.is_collective_max() || params.is_balanced() {
        return Err(Error::domain(
            "gamma",
            "this concurrence form needs gamma = sqrt(gamma_a*gamma_b) and gamma_a != gamma_b",
        ));
    }
    let k2 = params.kappa() * params.kappa();
    let e = params.epsilon();
    let ga = params.gamma_a();
    let gb = params.gamma_b();
    let g0 = params.gamma0();
    let a = g0 * g0 + 4.0 * params.omega() * params.omega();
    let dt = k2 * a + e * e * (g0 * g0 + 4.0 * k2);
    if !(dt > 0.0) {
        return Err(Error::SingularRegime("D~ vanishes: no unique steady state".into()));
    }
    let pre = 2.0 * e / dt;
    let c1 = pre
        * (0.5 * e * (k2 * (ga - gb) * (ga - gb) + ga * gb * g0 * g0).sqrt() - k2 * (e * e + a).sqrt());
    let c2 = pre
        * (k2 * a.sqrt() - 0.5 * e * ((2.0 * k2 + ga * g0) * (2.0 * k2 + gb * g0)).sqrt());
    Ok(ConcurrenceResult::from_branches(c1, c2))
}

/// Mean photon numbers `(n_A, n_B)`. Mode A is excited in |3> = |1A,0B> and
/// |4>, mode B in |2> = |0A,1B> and |4>.
pub fn photon_numbers(rho: &XDensityMatrix) -> (f64, f64) {
    (rho.p33 + rho.p44, rho.p22 + rho.p44)
}

/// Zero-delay cross-correlation `ρ44 / (n_A n_B)`.
pub fn g2(rho: &XDensityMatrix) -> Result<f64> {
    let (na, nb) = photon_numbers(rho);
    if !(na > 0.0 && nb > 0.0) {
        return Err(Error::domain("state", "g2 needs both modes to hold photons"));
    }
    Ok(rho.p44 / (na * nb))
}

/// Closed-form limits of g2 for separate reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum G2Limit {
    /// γA = γB: exact value, always above one.
    Balanced(f64),
    /// γA ≠ γB, κ < ε: approximate value, below one.
    AntibunchedApprox(f64),
}

impl G2Limit {
    pub fn value(self) -> f64 {
        match self {
            G2Limit::Balanced(v) | G2Limit::AntibunchedApprox(v) => v,
        }
    }
}

pub fn g2_analytic_limits(params: &SystemParams) -> Result<G2Limit> {
    if !params.is_independent() {
        return Err(Error::domain("gamma", "the g2 limits are for separate reservoirs (gamma = 0)"));
    }
    let e = params.epsilon();
    let g0 = params.gamma0();
    if params.is_balanced() {
        if !(e > 0.0) {
            return Err(Error::domain("epsilon", "g2 is undefined without pair creation"));
        }
        let w = params.omega();
        return Ok(G2Limit::Balanced(1.0 + (4.0 * w * w + g0 * g0) / (4.0 * e * e)));
    }
    let k = params.kappa();
    if !(k < e) {
        return Err(Error::domain("kappa", "the antibunching limit needs kappa < epsilon"));
    }
    let gd = params.gamma_d();
    let s = 4.0 * k * k + g0 * g0;
    Ok(G2Limit::AntibunchedApprox(1.0 - 4.0 * k * k * gd * gd / (s * s - g0 * g0 * gd * gd)))
}

/// `(ρ22/ρ44, ρ33/ρ44)`.
pub fn inversion_ratios(rho: &XDensityMatrix) -> Result<(f64, f64)> {
    if !(rho.p44 > 0.0) {
        return Err(Error::domain("state", "population ratios need rho44 > 0"));
    }
    Ok((rho.p22 / rho.p44, rho.p33 / rho.p44))
}

/// Everything above for one state; entries that are undefined for the state
/// are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    pub visibility: Option<f64>,
    pub concurrence: ConcurrenceResult,
    pub g2: Option<f64>,
    pub n_a: f64,
    pub n_b: f64,
    pub ratio_24: Option<f64>,
    pub ratio_34: Option<f64>,
}

pub const OBSERVABLE_COLUMNS: [&str; 9] =
    ["visibility", "c", "c1", "c2", "g2", "n_a", "n_b", "ratio_24", "ratio_34"];

impl ObservableSet {
    pub fn from_state(rho: &XDensityMatrix) -> Self {
        let (n_a, n_b) = photon_numbers(rho);
        let ratios = inversion_ratios(rho).ok();
        ObservableSet {
            visibility: visibility_from_state(rho).ok(),
            concurrence: concurrence(rho),
            g2: g2(rho).ok(),
            n_a,
            n_b,
            ratio_24: ratios.map(|r| r.0),
            ratio_34: ratios.map(|r| r.1),
        }
    }

    /// Values in [`OBSERVABLE_COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 9] {
        [
            self.visibility,
            Some(self.concurrence.c),
            Some(self.concurrence.c1),
            Some(self.concurrence.c2),
            self.g2,
            Some(self.n_a),
            Some(self.n_b),
            self.ratio_24,
            self.ratio_34,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::fock::FockState;
    use crate::steadystate::{analytic, analytic_balanced, analytic_balanced_max, analytic_independent};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dark_state() -> XDensityMatrix {
        XDensityMatrix { p11: 0.0, p22: 0.5, p33: 0.5, rho23: cx(-0.5, 0.0), ..XDensityMatrix::vacuum() }
    }

    #[test]
    fn intensity_examples() {
        let cfg = InterferenceConfig::default();
        assert_eq!(intensity(&XDensityMatrix::vacuum(), &cfg), 0.0);
        let flat = XDensityMatrix { p11: 0.7, p22: 0.1, p33: 0.1, p44: 0.1, ..XDensityMatrix::vacuum() };
        let i0 = intensity(&flat, &cfg);
        for k in 0..8 {
            let cfg = InterferenceConfig::new(1.0, k as f64 * 0.8).unwrap();
            assert_eq!(intensity(&flat, &cfg), i0);
        }
        let rho = XDensityMatrix { rho23: cx(0.05, 0.07), ..flat };
        let (lo, hi) = fringe_extrema(&rho, 1.0);
        let samples: Vec<f64> = (0..2000)
            .map(|k| intensity(&rho, &InterferenceConfig::new(1.0, k as f64 * std::f64::consts::TAU / 2000.0).unwrap()))
            .collect();
        let max = samples.iter().copied().fold(f64::MIN, f64::max);
        let min = samples.iter().copied().fold(f64::MAX, f64::min);
        assert!((max - hi).abs() < 1e-6 && (min - lo).abs() < 1e-6);
        assert_relative_eq!((hi - lo) / (hi + lo), visibility_from_state(&rho).unwrap(), max_relative = 1e-14);
        assert!(InterferenceConfig::new(0.0, 0.0).is_err());
    }

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility_from_state(&dark_state()).unwrap(), 1.0);
        assert!(visibility_from_state(&XDensityMatrix::vacuum()).is_err());
        let p = SystemParams::new(1.0, 0.4, 1.0, 1.0, 1.0, 1.0).unwrap();
        let v = visibility_from_state(&analytic_balanced_max(&p, 0.0).unwrap().rho).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn visibility_landmarks() {
        // R = 1/2, |u| = 1
        let p = SystemParams::new(1.0, 0.5, 0.3, 2.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(visibility_analytic(&p, None).unwrap(), 0.5, max_relative = 1e-15);
        for u in [0.5, 0.1, 0.01] {
            assert_relative_eq!(visibility_common(0.0, u), (1.0f64 - u * u).sqrt(), max_relative = 1e-15);
        }
        let q = SystemParams::new(1.3, 0.4, 0.7, 0.2, 0.2, 0.2).unwrap();
        assert_eq!(visibility_analytic(&q, Some(1.0)).unwrap(), 1.0);
        assert!(matches!(visibility_analytic(&q, None), Err(Error::MissingInitialCondition)));
        let balanced = SystemParams::new(1.0, 0.4, 0.7, 0.2, 0.2, 0.1).unwrap();
        assert!(visibility_analytic(&balanced, None).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let d = concurrence(&dark_state());
        assert_eq!((d.c1, d.c), (1.0, 1.0));
        assert_eq!(concurrence(&XDensityMatrix::vacuum()).c, 0.0);

        let p = SystemParams::new(1.0, 0.3, 1.0, 1.0, 1.0, 0.0).unwrap();
        let rho = analytic_balanced(&SystemParams::new(1.0, 0.3, 1.0, 1.0, 1.0, 0.5).unwrap()).unwrap().rho;
        let c = concurrence(&rho);
        assert_relative_eq!(c.c1, -2.0 * (2.0f64 / 27.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(c.c, 2.0 * (5f64.sqrt() - 1.0) / 9.0, max_relative = 1e-14);
        let a = concurrence_analytic_independent(&p).unwrap();
        assert_relative_eq!(a.c, c.c, max_relative = 1e-14);
    }

    #[test]
    fn two_photon_peak() {
        let (w, g0) = (1.0f64, 0.01f64);
        let s = (4.0 * w * w + g0 * g0).sqrt();
        let at = |e: f64| {
            concurrence_analytic_independent(&SystemParams::new(w, 0.3, e, g0, g0, 0.0).unwrap()).unwrap().c2
        };
        assert_relative_eq!(at(s / 4.0), 0.3, max_relative = 1e-12);
        // the true maximum sits at ε = s(√5 − 1)/4
        let x = (5f64.sqrt() - 1.0) / 4.0;
        assert_relative_eq!(at(s * x), x, max_relative = 1e-12);
        assert!(at(s * x) > at(s / 4.0));
    }

    #[test]
    fn one_photon_branch_limit() {
        // ε, γ0 ≫ κ and |γd| = γ0
        let p = SystemParams::new(1.0, 1e-3, 50.0, 2.0, 0.0, 0.0).unwrap();
        let c = concurrence_analytic_independent(&p).unwrap();
        assert_relative_eq!(c.c1, 2.0 * 1e-3 / 1.0, max_relative = 1e-2);
        let zero = concurrence_analytic_independent(&SystemParams::new(1.0, 0.3, 0.0, 0.2, 0.1, 0.0).unwrap()).unwrap();
        assert!(zero.c1 <= 0.0 && zero.c2 <= 0.0 && zero.c == 0.0);
    }

    #[test]
    fn trapped_concurrence() {
        for e in [0.1, 1.0, 3.0] {
            let p = SystemParams::collective(1.0, 0.0, e, 0.2, 0.01).unwrap();
            let c = concurrence_analytic_collective(&p).unwrap();
            assert_relative_eq!(c.c1, p.gamma_max() / p.gamma0(), max_relative = 1e-12);
            assert!(c.c2 < 0.0);
            let d = p.derive().unwrap();
            assert_relative_eq!(c.c1, visibility_common(d.ratio_r, d.ratio_u), max_relative = 1e-12);
        }
        let near = SystemParams::collective(1.0, 0.0, 1.0, 0.1001, 0.1).unwrap();
        assert!(concurrence_analytic_collective(&near).unwrap().c1 > 0.999);
    }

    #[test]
    fn g2_examples() {
        let p = SystemParams::new(1.0, 0.3, 1.0, 1.0, 1.0, 0.0).unwrap();
        let rho = analytic_independent(&p).unwrap().rho;
        assert_relative_eq!(g2(&rho).unwrap(), 2.25, max_relative = 1e-14);
        assert_eq!(g2_analytic_limits(&p).unwrap(), G2Limit::Balanced(2.25));
        let no_pairs = XDensityMatrix { p11: 0.6, p22: 0.2, p33: 0.2, ..XDensityMatrix::vacuum() };
        assert_eq!(g2(&no_pairs).unwrap(), 0.0);
        assert!(g2(&XDensityMatrix::vacuum()).is_err());

        let unbalanced = SystemParams::new(1.0, 0.0, 1.0, 0.2, 0.01, 0.0).unwrap();
        assert_eq!(g2_analytic_limits(&unbalanced).unwrap().value(), 1.0);
        let anti = SystemParams::new(1.0, 0.05, 1.0, 0.2, 0.01, 0.0).unwrap();
        assert!(g2_analytic_limits(&anti).unwrap().value() < 1.0);
        assert!(g2_analytic_limits(&SystemParams::new(1.0, 2.0, 1.0, 0.2, 0.01, 0.0).unwrap()).is_err());
        let big = SystemParams::new(1.0, 0.3, 1e4, 1.0, 1.0, 0.0).unwrap();
        let v = g2_analytic_limits(&big).unwrap().value();
        assert!(v > 1.0 && v < 1.0 + 1e-7);
    }

    #[test]
    fn photon_numbers_follow_operator_definition() {
        let rho = analytic(&SystemParams::new(1.0, 0.3, 0.9, 0.4, 0.1, 0.1).unwrap(), None).unwrap().rho;
        let fock = FockState::from_x(&rho, 1, 1.0, 0.0);
        let (na, nb) = fock.photon_numbers();
        let (xa, xb) = photon_numbers(&rho);
        assert!((na - xa).abs() < 1e-15 && (nb - xb).abs() < 1e-15);
        assert_eq!(photon_numbers(&XDensityMatrix::vacuum()), (0.0, 0.0));
    }

    #[test]
    fn ratios() {
        let p = SystemParams::collective(1.0, 0.3, 0.9, 0.4, 0.1).unwrap();
        let (r24, r34) = inversion_ratios(&analytic(&p, None).unwrap().rho).unwrap();
        assert!(r24 >= 1.0 && r34 >= 1.0);
        assert!(inversion_ratios(&XDensityMatrix::vacuum()).is_err());
    }

    #[test]
    fn observable_set_columns() {
        let set = ObservableSet::from_state(&XDensityMatrix::vacuum());
        assert_eq!(set.values().len(), OBSERVABLE_COLUMNS.len());
        assert_eq!(set.visibility, None);
        assert_eq!(set.concurrence.c, 0.0);
    }

    fn arb_rates() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
        (0.2f64..2.0, 0.0f64..2.0, 0.05f64..2.0, 1e-3f64..2.0, 1e-3f64..2.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn closed_form_visibility_matches_state(
            (w, k, e, ga, gb) in arb_rates(), f in 0.0f64..=1.0, pdd0 in 0.0f64..=1.0,
        ) {
            prop_assume!((ga - gb).abs() > 1e-6 * (ga + gb));
            for gamma in [0.0, (ga * gb).sqrt() * f, (ga * gb).sqrt()] {
                let p = SystemParams::new(w, k, e, ga, gb, gamma).unwrap();
                if p.is_collective_max() && k == 0.0 { continue; }
                let rho = analytic(&p, None).unwrap().rho;
                let from_state = visibility_from_state(&rho).unwrap();
                let closed = visibility_analytic(&p, None).unwrap();
                prop_assert!((from_state - closed).abs() < 1e-10, "{from_state} vs {closed}");
            }
            let p = SystemParams::collective(w, k, e, ga, ga).unwrap();
            let rho = analytic(&p, Some(pdd0)).unwrap().rho;
            let v = visibility_analytic(&p, Some(pdd0)).unwrap();
            prop_assert!((visibility_from_state(&rho).unwrap() - v).abs() < 1e-10);
        }

        #[test]
        fn closed_form_concurrence_matches_state((w, k, e, ga, gb) in arb_rates()) {
            let p = SystemParams::new(w, k, e, ga, gb, 0.0).unwrap();
            let a = concurrence_analytic_independent(&p).unwrap();
            let s = concurrence(&analytic(&p, None).unwrap().rho);
            prop_assert!((a.c1 - s.c1).abs() < 1e-12 && (a.c2 - s.c2).abs() < 1e-12);
            prop_assume!((ga - gb).abs() > 1e-6);
            let p = SystemParams::collective(w, k, e, ga, gb).unwrap();
            let a = concurrence_analytic_collective(&p).unwrap();
            let s = concurrence(&analytic(&p, None).unwrap().rho);
            prop_assert!((a.c1 - s.c1).abs() < 1e-12 && (a.c2 - s.c2).abs() < 1e-12);
        }

        #[test]
        fn separate_reservoir_visibility_bound(r in 0.0f64..10.0, u in -1.0f64..=1.0) {
            prop_assert!(visibility_separate(r, u) <= 0.5 + 1e-12);
        }

        #[test]
        fn balanced_bunching((w, k, e, g0, _) in arb_rates()) {
            let p = SystemParams::new(w, k, e, g0, g0, 0.0).unwrap();
            prop_assert!(g2(&analytic(&p, None).unwrap().rho).unwrap() > 1.0);
        }
    }
}
