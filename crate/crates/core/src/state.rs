//! Reduced density matrix of the dot pair in the basis
//! `|0>` (empty), `|1>`, `|2>` (one electron on dot 1 or 2), `|3>` (both).
//!
//! Because the total state is Gaussian, the many-body matrix follows from the
//! single-particle occupation matrix `v`:
//! `rho_00 = det(I - v)`, `rho_33 = det v`, `rho_ii = v_ii - det v`,
//! `rho_21 = v_21`. Only the one-electron block has coherences.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mat2::ComplexMat2;
use crate::propagator::OccupationMatrix;

/// Occupation eigenvalues may stray this far outside `[0, 1]` (quadrature noise).
pub const OCCUPATION_TOL: f64 = 1e-8;

/// `|rho_21|` at or below which the coherence phase is reported undefined.
pub const PHASE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    /// `<2|rho|1>`; `rho_12` is its conjugate.
    pub rho21: C64,
}

impl ReducedDensityMatrix {
    pub fn empty() -> Self {
        Self {
            rho00: 1.0,
            rho11: 0.0,
            rho22: 0.0,
            rho33: 0.0,
            rho21: C64::new(0.0, 0.0),
        }
    }

    /// Pure one-electron state `a|1> + b|2>` (normalised by the caller).
    pub fn pure_one_electron(a: C64, b: C64) -> Self {
        Self {
            rho00: 0.0,
            rho11: a.norm_sqr(),
            rho22: b.norm_sqr(),
            rho33: 0.0,
            rho21: b * a.conj(),
        }
    }

    pub fn rho12(&self) -> C64 {
        self.rho21.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11 + self.rho22 + self.rho33
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.rho00 * self.rho00
            + self.rho11 * self.rho11
            + self.rho22 * self.rho22
            + self.rho33 * self.rho33
            + 2.0 * self.rho21.norm_sqr()
    }

    /// Probability outside the one-electron sector.
    pub fn leakage(&self) -> f64 {
        self.rho00 + self.rho33
    }

    /// The 2x2 one-electron block `[[rho11, rho12], [rho21, rho22]]`.
    pub fn one_electron_block(&self) -> ComplexMat2 {
        ComplexMat2::new(
            C64::new(self.rho11, 0.0),
            self.rho12(),
            self.rho21,
            C64::new(self.rho22, 0.0),
        )
    }

    /// Full 4x4 matrix, `dense[i][j] = <i|rho|j>`.
    pub fn to_dense(&self) -> [[C64; 4]; 4] {
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        [
            [r(self.rho00), z, z, z],
            [z, r(self.rho11), self.rho12(), z],
            [z, self.rho21, r(self.rho22), z],
            [z, z, z, r(self.rho33)],
        ]
    }

    /// The six independent components compared between solvers:
    /// `rho00, rho11, rho22, rho33, Re rho21, Im rho21`.
    pub fn components(&self) -> [f64; 6] {
        [self.rho00, self.rho11, self.rho22, self.rho33, self.rho21.re, self.rho21.im]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn assemble_rho(v: &OccupationMatrix) -> Result<ReducedDensityMatrix> {
    let [min, max] = v.eigenvalues();
    if min < -OCCUPATION_TOL || max > 1.0 + OCCUPATION_TOL {
        return Err(Error::InvalidOccupation { min, max });
    }
    Ok(rho_from_v(&v.v))
}

/// The algebraic map without bounds checking.
pub fn rho_from_v(v: &ComplexMat2) -> ReducedDensityMatrix {
    let det = v.det().re;
    let empty = (ComplexMat2::IDENTITY - *v).det().re;
    ReducedDensityMatrix {
        rho00: empty,
        rho11: v[(0, 0)].re - det,
        rho22: v[(1, 1)].re - det,
        rho33: det,
        rho21: v[(1, 0)],
    }
}

/// Polarisation vector of the one-electron block plus leakage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub r: [f64; 3],
    pub leakage: f64,
}

impl BlochState {
    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Azimuth of `r` in the x-y plane.
    pub fn azimuth(&self) -> f64 {
        self.r[1].atan2(self.r[0])
    }
}

pub fn bloch_vector(rho: &ReducedDensityMatrix) -> BlochState {
    BlochState {
        r: [2.0 * rho.rho21.re, 2.0 * rho.rho21.im, rho.rho11 - rho.rho22],
        leakage: rho.leakage(),
    }
}

/// Argument of `rho_21` in `(-pi, pi]`.
pub fn coherence_phase(rho: &ReducedDensityMatrix) -> Result<f64> {
    coherence_phase_with_floor(rho, PHASE_FLOOR)
}

pub fn coherence_phase_with_floor(rho: &ReducedDensityMatrix, floor: f64) -> Result<f64> {
    let magnitude = rho.rho21.norm();
    if magnitude <= floor {
        return Err(Error::PhaseUndefined { magnitude });
    }
    let a = rho.rho21.arg();
    // atan2 returns -pi for (-x, -0.0); fold onto +pi.
    Ok(if a <= -std::f64::consts::PI { std::f64::consts::PI } else { a })
}

/// Target molecular state `(|1> + e^{-i phi/2}|2>)/sqrt 2` as amplitudes.
pub fn target_state(phi: f64) -> [C64; 2] {
    let k = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(k, 0.0), C64::from_polar(k, -0.5 * phi)]
}

/// `<psi(phi)| rho |psi(phi)>` using the unnormalised one-electron block.
pub fn fidelity_to_target(rho: &ReducedDensityMatrix, phi: f64) -> f64 {
    let psi = target_state(phi);
    let block = rho.one_electron_block();
    let x = block.mul_vec(psi);
    (psi[0].conj() * x[0] + psi[1].conj() * x[1]).re
}
