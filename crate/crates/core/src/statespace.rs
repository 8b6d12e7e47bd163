//! The four low-excitation states and X-shaped density matrices over them.

use std::fmt;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances applied to freshly constructed states.
pub const CONSTRUCTION_TRACE_TOL: f64 = 1e-12;
/// Tolerances applied to states produced by time integration.
pub const INTEGRATION_TRACE_TOL: f64 = 1e-9;
/// Allowed negativity of populations and of the X-block determinants.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Product states with at most one photon per mode, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    /// |0_A 0_B>
    S1,
    /// |0_A 1_B>
    S2,
    /// |1_A 0_B>
    S3,
    /// |1_A 1_B>
    S4,
}

impl BasisLabel {
    pub const ALL: [BasisLabel; 4] = [BasisLabel::S1, BasisLabel::S2, BasisLabel::S3, BasisLabel::S4];

    /// Zero-based position in the basis.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Photon numbers `(n_A, n_B)`.
    pub fn occupation(self) -> (usize, usize) {
        match self {
            BasisLabel::S1 => (0, 0),
            BasisLabel::S2 => (0, 1),
            BasisLabel::S3 => (1, 0),
            BasisLabel::S4 => (1, 1),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.occupation();
        write!(f, "|{a}A,{b}B>")
    }
}

/// Density matrix whose only non-zero off-diagonal entries are ρ23 and ρ14
/// (and their conjugates).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XDensityMatrix {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub rho23: Complex64,
    pub rho14: Complex64,
}

/// Column names used for CSV output, in [`XDensityMatrix::csv_values`] order.
pub const X_STATE_COLUMNS: [&str; 8] = [
    "p11", "p22", "p33", "p44", "re_rho23", "im_rho23", "re_rho14", "im_rho14",
];

impl XDensityMatrix {
    /// Builds a state and checks it at construction tolerance.
    pub fn new(p11: f64, p22: f64, p33: f64, p44: f64, rho23: Complex64, rho14: Complex64) -> Result<Self> {
        let rho = XDensityMatrix { p11, p22, p33, p44, rho23, rho14 };
        rho.check(CONSTRUCTION_TRACE_TOL, POSITIVITY_TOL)?;
        Ok(rho)
    }

    /// Both modes in their ground state.
    pub fn vacuum() -> Self {
        XDensityMatrix {
            p11: 1.0,
            p22: 0.0,
            p33: 0.0,
            p44: 0.0,
            rho23: Complex64::new(0.0, 0.0),
            rho14: Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> f64 {
        self.p11 + self.p22 + self.p33 + self.p44
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.p11, self.p22, self.p33, self.p44]
    }

    /// `ρ22 ρ33 − |ρ23|²`, non-negative for a physical state.
    pub fn single_block_margin(&self) -> f64 {
        self.p22 * self.p33 - self.rho23.norm_sqr()
    }

    /// `ρ11 ρ44 − |ρ14|²`, non-negative for a physical state.
    pub fn outer_block_margin(&self) -> f64 {
        self.p11 * self.p44 - self.rho14.norm_sqr()
    }

    /// Verifies finiteness, trace, populations and the two 2×2 X-blocks.
    ///
    /// For an X-shaped matrix the blocks decouple, so this is equivalent to
    /// a full eigenvalue check.
    pub fn check(&self, trace_tol: f64, positivity_tol: f64) -> Result<()> {
        let values = self.csv_values();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite entry in {values:?}")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1 by more than {trace_tol}")));
        }
        for (label, p) in BasisLabel::ALL.iter().zip(self.populations()) {
            if p < -positivity_tol {
                return Err(Error::InvalidState(format!("population of {label} is {p}")));
            }
        }
        let single = self.single_block_margin();
        if single < -positivity_tol {
            return Err(Error::InvalidState(format!("rho22*rho33 - |rho23|^2 = {single}")));
        }
        let outer = self.outer_block_margin();
        if outer < -positivity_tol {
            return Err(Error::InvalidState(format!("rho11*rho44 - |rho14|^2 = {outer}")));
        }
        Ok(())
    }

    /// Dense 4×4 view in basis order.
    pub fn to_dense(&self) -> Matrix4<Complex64> {
        let re = |x: f64| Complex64::new(x, 0.0);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = re(self.p11);
        m[(1, 1)] = re(self.p22);
        m[(2, 2)] = re(self.p33);
        m[(3, 3)] = re(self.p44);
        m[(1, 2)] = self.rho23;
        m[(2, 1)] = self.rho23.conj();
        m[(0, 3)] = self.rho14;
        m[(3, 0)] = self.rho14.conj();
        m
    }

    /// Reads the X entries of a dense matrix. Other entries are ignored; use
    /// [`off_x_magnitude`] to see how large they are.
    pub fn from_dense(m: &Matrix4<Complex64>) -> Self {
        XDensityMatrix {
            p11: m[(0, 0)].re,
            p22: m[(1, 1)].re,
            p33: m[(2, 2)].re,
            p44: m[(3, 3)].re,
            rho23: m[(1, 2)],
            rho14: m[(0, 3)],
        }
    }

    /// Eigenvalues of the dense view, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        // The blocks are Hermitian 2×2, so closed forms suffice.
        let block = |a: f64, d: f64, c: Complex64| {
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + c.norm_sqr()).sqrt();
            [mean - r, mean + r]
        };
        let [a, b] = block(self.p22, self.p33, self.rho23);
        let [c, d] = block(self.p11, self.p44, self.rho14);
        let mut out = [a, b, c, d];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn csv_values(&self) -> [f64; 8] {
        [
            self.p11,
            self.p22,
            self.p33,
            self.p44,
            self.rho23.re,
            self.rho23.im,
            self.rho14.re,
            self.rho14.im,
        ]
    }

    /// Largest entrywise difference, comparing complex entries by modulus.
    pub fn max_abs_diff(&self, other: &XDensityMatrix) -> f64 {
        [
            (self.p11 - other.p11).abs(),
            (self.p22 - other.p22).abs(),
            (self.p33 - other.p33).abs(),
            (self.p44 - other.p44).abs(),
            (self.rho23 - other.rho23).norm(),
            (self.rho14 - other.rho14).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Largest entrywise relative difference `|a − b| / |b|` with `other` as
    /// reference. Entries where the reference is exactly zero contribute
    /// their absolute difference instead.
    pub fn max_rel_diff(&self, other: &XDensityMatrix) -> f64 {
        let rel = |d: f64, r: f64| if r == 0.0 { d } else { d / r };
        [
            rel((self.p11 - other.p11).abs(), other.p11.abs()),
            rel((self.p22 - other.p22).abs(), other.p22.abs()),
            rel((self.p33 - other.p33).abs(), other.p33.abs()),
            rel((self.p44 - other.p44).abs(), other.p44.abs()),
            rel((self.rho23 - other.rho23).norm(), other.rho23.norm()),
            rel((self.rho14 - other.rho14).norm(), other.rho14.norm()),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Largest modulus among entries of a dense 4×4 matrix that lie outside the
/// X pattern.
pub fn off_x_magnitude(m: &Matrix4<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let on_x = i == j || i + j == 3;
            if !on_x {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// The state in the basis {|1>, |b>, |d>, |4>}, where |b> and |d> are the
/// bright and dark superpositions of |2> and |3>.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BdDensity {
    pub p11: f64,
    pub p_bb: f64,
    pub p_dd: f64,
    pub rho_bd: Complex64,
    pub p44: f64,
    /// Two-photon coherence, unchanged by the transform.
    pub rho14: Complex64,
}

impl BdDensity {
    pub fn trace(&self) -> f64 {
        self.p11 + self.p_bb + self.p_dd + self.p44
    }
}

/// Mixing weights `(c, s)` with `|b> = c|2> + s|3>`, `|d> = −s|2> + c|3>`.
pub fn bd_weights(gamma_a: f64, gamma_b: f64) -> Result<(f64, f64)> {
    let total = gamma_a + gamma_b;
    if !(total > 0.0) || gamma_a < 0.0 || gamma_b < 0.0 {
        return Err(Error::domain(
            "gamma_a + gamma_b",
            "the bright/dark basis needs non-negative rates with a positive sum",
        ));
    }
    Ok(((gamma_b / total).sqrt(), (gamma_a / total).sqrt()))
}

pub fn to_bd(rho: &XDensityMatrix, gamma_a: f64, gamma_b: f64) -> Result<BdDensity> {
    let (c, s) = bd_weights(gamma_a, gamma_b)?;
    let cs = c * s;
    let re23 = rho.rho23.re;
    Ok(BdDensity {
        p11: rho.p11,
        p_bb: c * c * rho.p22 + s * s * rho.p33 + 2.0 * cs * re23,
        p_dd: s * s * rho.p22 + c * c * rho.p33 - 2.0 * cs * re23,
        rho_bd: Complex64::new(cs * (rho.p33 - rho.p22), 0.0) + c * c * rho.rho23 - s * s * rho.rho23.conj(),
        p44: rho.p44,
        rho14: rho.rho14,
    })
}

pub fn from_bd(bd: &BdDensity, gamma_a: f64, gamma_b: f64) -> Result<XDensityMatrix> {
    let (c, s) = bd_weights(gamma_a, gamma_b)?;
    let cs = c * s;
    let re_bd = bd.rho_bd.re;
    Ok(XDensityMatrix {
        p11: bd.p11,
        p22: c * c * bd.p_bb + s * s * bd.p_dd - 2.0 * cs * re_bd,
        p33: s * s * bd.p_bb + c * c * bd.p_dd + 2.0 * cs * re_bd,
        p44: bd.p44,
        rho23: Complex64::new(cs * (bd.p_bb - bd.p_dd), 0.0) + c * c * bd.rho_bd - s * s * bd.rho_bd.conj(),
        rho14: bd.rho14,
    })
}
