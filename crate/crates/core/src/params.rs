//! Physical parameters of the coupled-mode model.
//!
//! Rates and couplings are angular frequencies in whatever time unit the
//! caller chooses; nothing is renormalized behind the caller's back.
//! [`SystemParams::in_units_of_omega`] gives the dimensionless view.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether parameters sit exactly on one of
/// the special regimes (balanced decay, maximal collective damping, γ = 0).
pub const REGIME_RTOL: f64 = 1e-12;

/// Collective (cross) damping rate `sqrt(γA γB) cos θ` for polarization angle θ.
pub fn collective_rate(gamma_a: f64, gamma_b: f64, theta: f64) -> Result<f64> {
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    check_theta(theta)?;
    // sin(π/2 - θ) is exactly 0 at θ = π/2 and exactly 1 at θ = 0.
    Ok((gamma_a * gamma_b).sqrt() * (FRAC_PI_2 - theta).sin())
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::domain(name, format!("must be finite, got {value}")));
    }
    if value < 0.0 {
        return Err(Error::domain(name, format!("must be non-negative, got {value}")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(
            "theta",
            format!("must lie in [0, pi/2], got {theta}"),
        ));
    }
    Ok(())
}

/// Validated model parameters.
///
/// Values are immutable once constructed; the `with_*`/[`SystemParams::set`]
/// methods return new validated copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega: f64,
    kappa: f64,
    epsilon: f64,
    gamma_a: f64,
    gamma_b: f64,
    gamma: f64,
    theta: Option<f64>,
    // γ is recomputed from θ when the local rates change.
    gamma_from_theta: bool,
}

impl SystemParams {
    /// Parameters with an explicitly supplied cross-damping rate γ.
    pub fn new(
        omega: f64,
        kappa: f64,
        epsilon: f64,
        gamma_a: f64,
        gamma_b: f64,
        gamma: f64,
    ) -> Result<Self> {
        SystemParams {
            omega,
            kappa,
            epsilon,
            gamma_a,
            gamma_b,
            gamma,
            theta: None,
            gamma_from_theta: false,
        }
        .validate()
    }

    /// Parameters whose cross-damping rate follows from the polarization angle.
    pub fn with_angle(
        omega: f64,
        kappa: f64,
        epsilon: f64,
        gamma_a: f64,
        gamma_b: f64,
        theta: f64,
    ) -> Result<Self> {
        let gamma = collective_rate(gamma_a, gamma_b, theta)?;
        SystemParams {
            omega,
            kappa,
            epsilon,
            gamma_a,
            gamma_b,
            gamma,
            theta: Some(theta),
            gamma_from_theta: true,
        }
        .validate()
    }

    /// Maximal collective damping, γ = sqrt(γA γB).
    pub fn collective(omega: f64, kappa: f64, epsilon: f64, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        Self::with_angle(omega, kappa, epsilon, gamma_a, gamma_b, 0.0)
    }

    /// Checks every invariant and returns the parameters unchanged.
    pub fn validate(self) -> Result<Self> {
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(Error::domain(
                "omega",
                format!("must be finite and strictly positive, got {}", self.omega),
            ));
        }
        check_rate("kappa", self.kappa)?;
        check_rate("epsilon", self.epsilon)?;
        check_rate("gamma_a", self.gamma_a)?;
        check_rate("gamma_b", self.gamma_b)?;
        check_rate("gamma", self.gamma)?;
        if let Some(theta) = self.theta {
            check_theta(theta)?;
        }
        let bound = self.gamma_a * self.gamma_b;
        if self.gamma * self.gamma > bound * (1.0 + REGIME_RTOL) {
            return Err(Error::domain(
                "gamma",
                format!(
                    "gamma^2 = {} exceeds gamma_a*gamma_b = {}",
                    self.gamma * self.gamma,
                    bound
                ),
            ));
        }
        Ok(self)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }
    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    /// Polarization angle, when one was supplied.
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    /// Mean damping (γA + γB)/2.
    pub fn gamma0(&self) -> f64 {
        (self.gamma_a + self.gamma_b) / 2.0
    }

    /// Signed half-difference (γA − γB)/2.
    pub fn gamma_d(&self) -> f64 {
        (self.gamma_a - self.gamma_b) / 2.0
    }

    /// `sqrt(γA γB)`, the largest admissible γ.
    pub fn gamma_max(&self) -> f64 {
        (self.gamma_a * self.gamma_b).sqrt()
    }

    pub fn derive(&self) -> Result<DerivedRates> {
        let gamma0 = self.gamma0();
        if gamma0 <= 0.0 {
            return Err(Error::domain(
                "gamma_a + gamma_b",
                "ratios R and u need a non-zero mean damping",
            ));
        }
        Ok(DerivedRates {
            gamma0,
            gamma_d: self.gamma_d(),
            ratio_r: self.kappa / gamma0,
            ratio_u: self.gamma_d() / gamma0,
        })
    }

    /// γA = γB within [`REGIME_RTOL`].
    pub fn is_balanced(&self) -> bool {
        (self.gamma_a - self.gamma_b).abs() <= REGIME_RTOL * self.gamma0()
    }

    /// γ = sqrt(γA γB) within [`REGIME_RTOL`].
    pub fn is_collective_max(&self) -> bool {
        (self.gamma - self.gamma_max()).abs() <= REGIME_RTOL * self.gamma0()
    }

    /// γ = 0 within [`REGIME_RTOL`].
    pub fn is_independent(&self) -> bool {
        self.gamma.abs() <= REGIME_RTOL * self.gamma0()
    }

    /// The same physics with every rate divided by ω (so ω = 1).
    pub fn in_units_of_omega(&self) -> SystemParams {
        let w = self.omega;
        SystemParams {
            omega: 1.0,
            kappa: self.kappa / w,
            epsilon: self.epsilon / w,
            gamma_a: self.gamma_a / w,
            gamma_b: self.gamma_b / w,
            gamma: self.gamma / w,
            ..*self
        }
    }

    /// Returns a copy with one parameter replaced.
    ///
    /// Changing `gamma_a`/`gamma_b` (or `gamma0`/`gamma_d`) recomputes γ when
    /// it was derived from θ; setting `gamma` makes it explicit while keeping
    /// θ as metadata.
    pub fn set(&self, name: ParamName, value: f64) -> Result<SystemParams> {
        let mut next = *self;
        match name {
            ParamName::Omega => next.omega = value,
            ParamName::Kappa => next.kappa = value,
            ParamName::Epsilon => next.epsilon = value,
            ParamName::GammaA => next.gamma_a = value,
            ParamName::GammaB => next.gamma_b = value,
            ParamName::Gamma => {
                next.gamma = value;
                next.gamma_from_theta = false;
            }
            ParamName::Theta => {
                next.theta = Some(value);
                next.gamma_from_theta = true;
            }
            ParamName::Gamma0 => {
                let d = self.gamma_d();
                next.gamma_a = value + d;
                next.gamma_b = value - d;
            }
            ParamName::GammaD => {
                let g0 = self.gamma0();
                next.gamma_a = g0 + value;
                next.gamma_b = g0 - value;
            }
        }
        if next.gamma_from_theta {
            let theta = next.theta.unwrap_or(0.0);
            next.gamma = collective_rate(next.gamma_a, next.gamma_b, theta)?;
        }
        next.validate()
    }

    pub fn get(&self, name: ParamName) -> Option<f64> {
        Some(match name {
            ParamName::Omega => self.omega,
            ParamName::Kappa => self.kappa,
            ParamName::Epsilon => self.epsilon,
            ParamName::GammaA => self.gamma_a,
            ParamName::GammaB => self.gamma_b,
            ParamName::Gamma => self.gamma,
            ParamName::Theta => return self.theta,
            ParamName::Gamma0 => self.gamma0(),
            ParamName::GammaD => self.gamma_d(),
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ParamFile = serde_json::from_str(text)
            .map_err(|e| Error::domain("parameter file", e.to_string()))?;
        file.try_into()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// File representation: θ is written whenever it is known, γ always.
    pub fn to_file(&self) -> ParamFile {
        ParamFile {
            omega: self.omega,
            kappa: self.kappa,
            epsilon: self.epsilon,
            gamma_a: self.gamma_a,
            gamma_b: self.gamma_b,
            theta: self.theta,
            gamma: if self.gamma_from_theta { None } else { Some(self.gamma) },
        }
    }
}

/// Derived damping quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedRates {
    pub gamma0: f64,
    pub gamma_d: f64,
    /// κ/γ0.
    pub ratio_r: f64,
    /// γd/γ0, always in [−1, 1].
    pub ratio_u: f64,
}

/// JSON parameter file. Unknown keys are rejected; when both `gamma` and
/// `theta` are present the explicit `gamma` wins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub omega: f64,
    pub kappa: f64,
    pub epsilon: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl TryFrom<ParamFile> for SystemParams {
    type Error = Error;

    fn try_from(f: ParamFile) -> Result<Self> {
        match (f.gamma, f.theta) {
            (Some(gamma), theta) => {
                if let Some(t) = theta {
                    check_theta(t)?;
                }
                SystemParams {
                    omega: f.omega,
                    kappa: f.kappa,
                    epsilon: f.epsilon,
                    gamma_a: f.gamma_a,
                    gamma_b: f.gamma_b,
                    gamma,
                    theta,
                    gamma_from_theta: false,
                }
                .validate()
            }
            (None, Some(theta)) => {
                SystemParams::with_angle(f.omega, f.kappa, f.epsilon, f.gamma_a, f.gamma_b, theta)
            }
            (None, None) => Err(Error::domain(
                "gamma",
                "either `gamma` or `theta` must be given",
            )),
        }
    }
}

impl Serialize for SystemParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut f = self.to_file();
        f.gamma = Some(self.gamma);
        f.serialize(s)
    }
}

/// Names accepted wherever a single parameter is addressed (sweep axes, CLI).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Omega,
    Kappa,
    Epsilon,
    GammaA,
    GammaB,
    Gamma,
    Theta,
    /// Mean damping, keeping γd fixed.
    Gamma0,
    /// Half-difference damping, keeping γ0 fixed.
    GammaD,
}

impl ParamName {
    pub const ALL: [ParamName; 9] = [
        ParamName::Omega,
        ParamName::Kappa,
        ParamName::Epsilon,
        ParamName::GammaA,
        ParamName::GammaB,
        ParamName::Gamma,
        ParamName::Theta,
        ParamName::Gamma0,
        ParamName::GammaD,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Omega => "omega",
            ParamName::Kappa => "kappa",
            ParamName::Epsilon => "epsilon",
            ParamName::GammaA => "gamma_a",
            ParamName::GammaB => "gamma_b",
            ParamName::Gamma => "gamma",
            ParamName::Theta => "theta",
            ParamName::Gamma0 => "gamma0",
            ParamName::GammaD => "gamma_d",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::domain("parameter name", format!("unknown parameter `{s}`")))
    }
}
