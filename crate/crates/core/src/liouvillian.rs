//! Linear generator for the X-state sector, `dY/dt = M Y + P`.
//!
//! `Y` packs the seven real unknowns as
//! `(ρ11, ρ22, ρ33, ρ23+ρ32, i(ρ23−ρ32), ρ14+ρ41, i(ρ14−ρ41))`,
//! with ρ44 fixed by the unit trace. Rows and columns are addressed 1..=7
//! by [`LinearSystem::entry`]; storage is zero-based and the only
//! translation happens in [`idx`].

use std::io;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{SystemParams, REGIME_RTOL};
use crate::statespace::{BdDensity, XDensityMatrix};

pub type Mat7 = SMatrix<f64, 7, 7>;
pub type Vec7 = SVector<f64, 7>;

/// Rank threshold on `σ_min/σ_max`.
pub const SINGULAR_RATIO: f64 = 1e-10;

/// One-based row/column label to storage index.
#[inline]
fn idx(k: usize) -> usize {
    debug_assert!((1..=7).contains(&k), "index {k} outside 1..=7");
    k - 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub params: SystemParams,
    pub m: Mat7,
    pub p: Vec7,
}

/// Outcome of the rank test on `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Singularity {
    Regular { sv_ratio: f64 },
    /// The dark-state population is conserved and the steady state depends on
    /// its initial value.
    Singular { sv_ratio: f64 },
}

impl Singularity {
    pub fn is_singular(&self) -> bool {
        matches!(self, Singularity::Singular { .. })
    }
}

impl LinearSystem {
    pub fn build(params: &SystemParams) -> Self {
        let w = params.omega();
        let k = params.kappa();
        let e = params.epsilon();
        let ga = params.gamma_a();
        let gb = params.gamma_b();
        let g = params.gamma();
        let g0 = params.gamma0();

        #[rustfmt::skip]
        let rows: [[f64; 7]; 7] = [
            [0.0,      gb,        ga,        g,        0.0,  0.0,  e      ],
            [-ga,      -2.0 * g0, -ga,       -g / 2.0, k,    0.0,  0.0    ],
            [-gb,      -gb,       -2.0 * g0, -g / 2.0, -k,   0.0,  0.0    ],
            [-2.0 * g, -3.0 * g,  -3.0 * g,  -g0,      0.0,  0.0,  0.0    ],
            [0.0,      -2.0 * k,  2.0 * k,   0.0,      -g0,  0.0,  0.0    ],
            [0.0,      0.0,       0.0,       0.0,      0.0,  -g0,  2.0 * w],
            [-4.0 * e, -2.0 * e,  -2.0 * e,  0.0,      0.0,  -2.0 * w, -g0],
        ];
        let mut m = Mat7::zeros();
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        let p = Vec7::from([0.0, ga, gb, 2.0 * g, 0.0, 0.0, 2.0 * e]);
        LinearSystem { params: *params, m, p }
    }

    /// `M[row][col]` with one-based labels.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[(idx(row), idx(col))]
    }

    /// `P[row]` with a one-based label.
    pub fn drive(&self, row: usize) -> f64 {
        self.p[idx(row)]
    }

    pub fn rhs(&self, y: &Vec7) -> Vec7 {
        self.m * y + self.p
    }

    pub fn singularity(&self) -> Singularity {
        let sv = self.m.singular_values();
        let max = sv.max();
        let min = sv.min();
        let sv_ratio = if max > 0.0 { min / max } else { 0.0 };
        if sv_ratio < SINGULAR_RATIO {
            Singularity::Singular { sv_ratio }
        } else {
            Singularity::Regular { sv_ratio }
        }
    }

    /// Eigenvalues of `M`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.m.complex_eigenvalues().iter().copied().collect()
    }

    /// Writes `M` and `P` as CSV: one row per equation, columns
    /// `row,m1..m7,p`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "m1", "m2", "m3", "m4", "m5", "m6", "m7", "p"])?;
        for r in 1..=7 {
            let mut record = vec![r.to_string()];
            record.extend((1..=7).map(|c| format!("{:?}", self.entry(r, c))));
            record.push(format!("{:?}", self.drive(r)));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn pack(rho: &XDensityMatrix) -> Vec7 {
    Vec7::from([
        rho.p11,
        rho.p22,
        rho.p33,
        2.0 * rho.rho23.re,
        -2.0 * rho.rho23.im,
        2.0 * rho.rho14.re,
        -2.0 * rho.rho14.im,
    ])
}

/// Inverse of [`pack`]; ρ44 is taken from the unit trace.
pub fn unpack(y: &Vec7) -> XDensityMatrix {
    XDensityMatrix {
        p11: y[0],
        p22: y[1],
        p33: y[2],
        p44: 1.0 - y[0] - y[1] - y[2],
        rho23: Complex64::new(0.5 * y[3], -0.5 * y[4]),
        rho14: Complex64::new(0.5 * y[5], -0.5 * y[6]),
    }
}

/// Like [`unpack`] for a time derivative: ρ̇44 is minus the sum of the other
/// population rates.
pub fn unpack_rate(dy: &Vec7) -> XDensityMatrix {
    XDensityMatrix {
        p44: -(dy[0] + dy[1] + dy[2]),
        ..unpack(dy)
    }
}

/// Time derivative of the X entries, written element by element rather than
/// through `M`. ρ44 of the input is ignored (the trace fixes it); the returned
/// ρ̇44 is minus the sum of the other population rates.
pub fn element_rhs(params: &SystemParams, rho: &XDensityMatrix) -> XDensityMatrix {
    let i = Complex64::i();
    let k = params.kappa();
    let e = params.epsilon();
    let ga = params.gamma_a();
    let gb = params.gamma_b();
    let g = params.gamma();
    let g0 = params.gamma0();
    let w = params.omega();
    let (p11, p22, p33) = (rho.p11, rho.p22, rho.p33);
    let r23 = rho.rho23;
    let r32 = r23.conj();
    let r14 = rho.rho14;
    let r41 = r14.conj();

    let minus_plus = Complex64::new(g, -2.0 * k) * 0.5;
    let plus_plus = Complex64::new(g, 2.0 * k) * 0.5;

    let d11 = gb * p22 + ga * p33 + g * (r23 + r32).re + (i * e * (r14 - r41)).re;
    let d22 = ga - 2.0 * g0 * p22 - ga * (p11 + p33) - (minus_plus * r23 + plus_plus * r32).re;
    let d33 = gb - 2.0 * g0 * p33 - gb * (p11 + p22) - (plus_plus * r23 + minus_plus * r32).re;
    let d23 = g - g0 * r23 - g * (p11 + p22 + p33) - minus_plus * p22 - plus_plus * p33;
    let d14 = -i * e - Complex64::new(g0, -2.0 * w) * r14 + i * e * (2.0 * p11 + p22 + p33);

    XDensityMatrix {
        p11: d11,
        p22: d22,
        p33: d33,
        p44: -(d11 + d22 + d33),
        rho23: d23,
        rho14: d14,
    }
}

/// Linear functional `ℓ` with `ℓ·Y = ρ_dd`, the dark-state population.
pub fn dark_population_functional(params: &SystemParams) -> Result<Vec7> {
    let g0 = params.gamma0();
    if g0 <= 0.0 {
        return Err(Error::domain("gamma_a + gamma_b", "the dark state needs damping"));
    }
    let two_g0 = 2.0 * g0;
    Ok(Vec7::from([
        0.0,
        params.gamma_a() / two_g0,
        params.gamma_b() / two_g0,
        -params.gamma_max() / two_g0,
        0.0,
        0.0,
        0.0,
    ]))
}

/// Generator in the {|1>, |b>, |d>, |4>} basis for balanced decay into a
/// common reservoir.
///
/// Unknowns, zero-based: `[ρ_dd, ρ_bb, Re ρ_bd, Im ρ_bd, ρ11, Re ρ14, Im ρ14]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub params: SystemParams,
    pub m: Mat7,
    pub p: Vec7,
}

impl ReducedSystem {
    /// Index of the conserved dark population.
    pub const CONSERVED: usize = 0;

    pub fn rhs(&self, z: &Vec7) -> Vec7 {
        self.m * z + self.p
    }

    pub fn pack(bd: &BdDensity) -> Vec7 {
        Vec7::from([
            bd.p_dd,
            bd.p_bb,
            bd.rho_bd.re,
            bd.rho_bd.im,
            bd.p11,
            bd.rho14.re,
            bd.rho14.im,
        ])
    }

    pub fn unpack(z: &Vec7) -> BdDensity {
        BdDensity {
            p_dd: z[0],
            p_bb: z[1],
            rho_bd: Complex64::new(z[2], z[3]),
            p11: z[4],
            p44: 1.0 - z[0] - z[1] - z[4],
            rho14: Complex64::new(z[5], z[6]),
        }
    }
}

pub fn build_reduced(params: &SystemParams) -> Result<ReducedSystem> {
    let g0 = params.gamma0();
    if g0 <= 0.0 || !params.is_balanced() {
        return Err(Error::domain(
            "gamma_a, gamma_b",
            "the reduced system needs gamma_a = gamma_b > 0",
        ));
    }
    if (params.gamma() - g0).abs() > REGIME_RTOL * g0 {
        return Err(Error::domain(
            "gamma",
            "the reduced system needs gamma = gamma0 (maximal collective damping)",
        ));
    }
    let k = params.kappa();
    let e = params.epsilon();
    let w = params.omega();
    let two_g0 = 2.0 * g0;
    // ρ̇bb = 2γ0 ρ44 − 2γ0 ρbb with ρ44 = 1 − ρdd − ρbb − ρ11
    let four_g0 = 4.0 * g0;

    #[rustfmt::skip]
    let rows: [[f64; 7]; 7] = [
        [0.0,     0.0,     0.0,      0.0,      0.0,     0.0,      0.0     ],
        [-two_g0, -four_g0, 0.0,     0.0,      -two_g0, 0.0,      0.0     ],
        [0.0,     0.0,     -g0,      2.0 * k,  0.0,     0.0,      0.0     ],
        [0.0,     0.0,     -2.0 * k, -g0,      0.0,     0.0,      0.0     ],
        [0.0,     two_g0,  0.0,      0.0,      0.0,     0.0,      -2.0 * e],
        [0.0,     0.0,     0.0,      0.0,      0.0,     -g0,      -2.0 * w],
        [e,       e,       0.0,      0.0,      2.0 * e, 2.0 * w,  -g0     ],
    ];
    let mut m = Mat7::zeros();
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m[(r, c)] = *v;
        }
    }
    let p = Vec7::from([0.0, two_g0, 0.0, 0.0, 0.0, 0.0, -e]);
    Ok(ReducedSystem { params: *params, m, p })
}
