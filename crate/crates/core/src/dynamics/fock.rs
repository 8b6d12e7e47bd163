//! Brute-force Lindblad evolution in a truncated two-mode Fock space.
//!
//! Everything here is built from ladder operators, independently of the
//! packed linear system, so the two can be checked against each other.
//! States live in the interaction picture; `|n_A, n_B>` sits at index
//! `n_A (N + 1) + n_B` for truncation `N`, which for `N = 1` is the order
//! |1>, |2>, |3>, |4> of the X-state basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{rk4_step, Integrator};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::statespace::XDensityMatrix;

type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Annihilation operator on one mode truncated at `n_max` photons.
pub fn annihilation(n_max: usize) -> CMat {
    let d = n_max + 1;
    CMat::from_fn(d, d, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) })
}

/// Largest entry modulus.
pub fn max_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Operators and rates of the master equation at one truncation.
#[derive(Debug, Clone)]
pub struct FockModel {
    pub params: SystemParams,
    pub n_max: usize,
    pub a: CMat,
    pub b: CMat,
    /// κ (a b† + a† b)
    hopping: CMat,
    /// ε a b; the Hamiltonian adds this times e^{2iωt} plus its adjoint.
    pair: CMat,
}

impl FockModel {
    pub fn new(params: &SystemParams, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::domain("n_max", "the truncation needs at least one photon per mode"));
        }
        let id = CMat::identity(n_max + 1, n_max + 1);
        let single = annihilation(n_max);
        let a = kron(&single, &id);
        let b = kron(&id, &single);
        let k = c(params.kappa());
        let hopping = (&a * b.adjoint() + a.adjoint() * &b) * k;
        let pair = (&a * &b) * c(params.epsilon());
        Ok(FockModel { params: *params, n_max, a, b, hopping, pair })
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    /// Interaction-picture coupling Hamiltonian at time `t` (ħ = 1).
    pub fn hamiltonian(&self, t: f64) -> CMat {
        let phase = Complex64::from_polar(1.0, 2.0 * self.params.omega() * t);
        &self.hopping + &self.pair * phase + self.pair.adjoint() * phase.conj()
    }

    /// Damping term: local decay of each mode plus the cross terms with
    /// rate γ, each written out as in the master equation.
    pub fn dissipator(&self, rho: &CMat) -> CMat {
        let p = &self.params;
        let mut out = CMat::zeros(rho.nrows(), rho.ncols());
        let ops = [&self.a, &self.b];
        let local = [p.gamma_a(), p.gamma_b()];
        for (op, rate) in ops.iter().zip(local) {
            if rate == 0.0 {
                continue;
            }
            let n = op.adjoint() * *op;
            let term = &n * rho + rho * &n - (*op * rho * op.adjoint()) * c(2.0);
            out -= term * c(0.5 * rate);
        }
        if p.gamma() != 0.0 {
            for (i, j) in [(0, 1), (1, 0)] {
                let (ai, aj) = (ops[i], ops[j]);
                let m = ai.adjoint() * aj;
                let term = &m * rho + rho * &m - (aj * rho * ai.adjoint()) * c(2.0);
                out -= term * c(0.5 * p.gamma());
            }
        }
        out
    }

    /// `dρ/dt = −i[H(t), ρ] + Lρ`.
    pub fn rhs(&self, t: f64, rho: &CMat) -> CMat {
        let h = self.hamiltonian(t);
        let commutator = &h * rho - rho * &h;
        commutator * Complex64::new(0.0, -1.0) + self.dissipator(rho)
    }
}

/// The generator applied to `rho` at time `t`.
pub fn fock_liouvillian(params: &SystemParams, n_max: usize, t: f64, rho: &FockState) -> Result<CMat> {
    let model = FockModel::new(params, n_max)?;
    if rho.n_max != n_max {
        return Err(Error::domain("n_max", "state and model truncations differ"));
    }
    Ok(model.rhs(t, &rho.rho))
}

/// Full density matrix in the truncated space, interaction picture.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub n_max: usize,
    pub rho: CMat,
}

impl FockState {
    pub fn vacuum(n_max: usize) -> Self {
        let d = (n_max + 1) * (n_max + 1);
        let mut rho = CMat::zeros(d, d);
        rho[(0, 0)] = c(1.0);
        FockState { n_max, rho }
    }

    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.n_max + 1) + n_b
    }

    /// Embeds an X-state (given in the rotated frame used by the linear
    /// system at time `t`) into the Fock space.
    pub fn from_x(rho: &XDensityMatrix, n_max: usize, omega: f64, t: f64) -> Self {
        let mut s = FockState::vacuum(n_max);
        s.rho[(0, 0)] = c(0.0);
        let i1 = s.index(0, 0);
        let i2 = s.index(0, 1);
        let i3 = s.index(1, 0);
        let i4 = s.index(1, 1);
        s.rho[(i1, i1)] = c(rho.p11);
        s.rho[(i2, i2)] = c(rho.p22);
        s.rho[(i3, i3)] = c(rho.p33);
        s.rho[(i4, i4)] = c(rho.p44);
        s.rho[(i2, i3)] = rho.rho23;
        s.rho[(i3, i2)] = rho.rho23.conj();
        let r14 = frame_to_fock(rho.rho14, omega, t);
        s.rho[(i1, i4)] = r14;
        s.rho[(i4, i1)] = r14.conj();
        s
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        max_norm(&(&self.rho - self.rho.adjoint()))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * c(0.5);
        herm.symmetric_eigenvalues().min()
    }

    /// Mean photon numbers `(⟨a†a⟩, ⟨b†b⟩)`.
    pub fn photon_numbers(&self) -> (f64, f64) {
        let mut na = 0.0;
        let mut nb = 0.0;
        for i in 0..=self.n_max {
            for j in 0..=self.n_max {
                let p = self.rho[(self.index(i, j), self.index(i, j))].re;
                na += i as f64 * p;
                nb += j as f64 * p;
            }
        }
        (na, nb)
    }

    /// Population outside the four states with at most one photon per mode.
    pub fn leakage(&self) -> f64 {
        let mut low = 0.0;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            low += self.rho[(self.index(i, j), self.index(i, j))].re;
        }
        self.trace().re - low
    }

    /// X-state entries in the rotated frame of the linear system at time `t`.
    pub fn to_x(&self, omega: f64, t: f64) -> XDensityMatrix {
        let i1 = self.index(0, 0);
        let i2 = self.index(0, 1);
        let i3 = self.index(1, 0);
        let i4 = self.index(1, 1);
        XDensityMatrix {
            p11: self.rho[(i1, i1)].re,
            p22: self.rho[(i2, i2)].re,
            p33: self.rho[(i3, i3)].re,
            p44: self.rho[(i4, i4)].re,
            rho23: self.rho[(i2, i3)],
            rho14: frame_from_fock(self.rho[(i1, i4)], omega, t),
        }
    }

    /// Largest coherence among the four low states that lies outside the X
    /// pattern.
    pub fn off_x_magnitude(&self) -> f64 {
        let low = [self.index(0, 0), self.index(0, 1), self.index(1, 0), self.index(1, 1)];
        let mut worst: f64 = 0.0;
        for (p, &i) in low.iter().enumerate() {
            for (q, &j) in low.iter().enumerate() {
                if p != q && p + q != 3 {
                    worst = worst.max(self.rho[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// JSON-ready dump (truncations up to three photons per mode).
    pub fn dump(&self, t: f64) -> Result<FockDump> {
        if self.n_max > 3 {
            return Err(Error::domain("n_max", "full dumps are limited to n_max <= 3"));
        }
        let d = self.rho.nrows();
        let mut basis = Vec::with_capacity(d);
        for i in 0..=self.n_max {
            for j in 0..=self.n_max {
                basis.push(format!("|{i},{j}>"));
            }
        }
        let rows = |f: fn(&Complex64) -> f64| {
            (0..d).map(|r| (0..d).map(|col| f(&self.rho[(r, col)])).collect()).collect()
        };
        Ok(FockDump { n_max: self.n_max, time: t, basis, re: rows(|z| z.re), im: rows(|z| z.im) })
    }
}

/// Serializable snapshot of a [`FockState`].
#[derive(Debug, Clone, Serialize)]
pub struct FockDump {
    pub n_max: usize,
    pub time: f64,
    pub basis: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Two-photon coherence of the linear system from ⟨00|ρ|11⟩ of the
/// interaction picture: `ρ14 = −conj(ρ_fock e^{−2iωt})`.
pub fn frame_from_fock(fock: Complex64, omega: f64, t: f64) -> Complex64 {
    -(fock * Complex64::from_polar(1.0, -2.0 * omega * t)).conj()
}

/// Inverse of [`frame_from_fock`].
pub fn frame_to_fock(x: Complex64, omega: f64, t: f64) -> Complex64 {
    -(x.conj()) * Complex64::from_polar(1.0, 2.0 * omega * t)
}

/// Sampled Fock-space trajectory.
#[derive(Debug, Clone)]
pub struct FockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FockState>,
    pub dt: f64,
}

/// RK4 evolution of the full master equation; the time-dependent
/// Hamiltonian is evaluated at the stage times (including midpoints).
pub fn evolve_fock(
    params: &SystemParams,
    n_max: usize,
    rho0: &FockState,
    t_end: f64,
    opts: &Integrator,
) -> Result<FockTrajectory> {
    let model = FockModel::new(params, n_max)?;
    if rho0.n_max != n_max {
        return Err(Error::domain("n_max", "state and model truncations differ"));
    }
    let (n, h) = opts.plan(params, t_end)?;
    let every = opts.record_every.max(1);
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut rho = rho0.rho.clone();
    for k in 1..=n {
        let t0 = (k - 1) as f64 * h;
        rho = rk4_step(|t, r: &CMat| model.rhs(t, r), t0, &rho, h);
        let t = k as f64 * h;
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        if k % every == 0 || k == n {
            times.push(t);
            states.push(FockState { n_max, rho: rho.clone() });
        }
    }
    Ok(FockTrajectory { times, states, dt: h })
}
