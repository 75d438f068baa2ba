//! Brute-force cross-check: each lead is replaced by `N` discrete modes on a
//! uniform grid and the closed single-particle problem is evolved exactly.
//!
//! Basis ordering is dots first (`a_1`, `a_2`), then the `N` left modes, then
//! the `N` right modes. The correlation matrix is `C_mn = <a_n^dagger a_m>`,
//! so its dot block is the occupation matrix `v` directly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mat2::ComplexMat2;
use crate::params::{fermi, BathParams, DeviceParams};
use crate::propagator::{OccupationMatrix, SampleTime};
use crate::state::{assemble_rho, ReducedDensityMatrix};

#[derive(Debug, Clone)]
pub struct DiscretizedLeadModel {
    pub n_modes: usize,
    pub half_bandwidth: f64,
    pub mode_energies: Vec<f64>,
    /// `V_{j alpha}` per dot `j` and lead `alpha`; identical for every mode.
    pub couplings: [[C64; 2]; 2],
    hamiltonian: DMatrix<C64>,
    initial: DVector<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

/// Single-particle correlation matrix of the closed system.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub c: DMatrix<C64>,
    pub time: f64,
}

impl CorrelationMatrix {
    pub fn dot_block(&self) -> ComplexMat2 {
        ComplexMat2::new(self.c[(0, 0)], self.c[(0, 1)], self.c[(1, 0)], self.c[(1, 1)])
    }

    pub fn trace(&self) -> f64 {
        self.c.trace().re
    }
}

pub fn build_model(
    device: &DeviceParams,
    bath: &BathParams,
    n_modes: usize,
    lead_bandwidth: f64,
) -> Result<DiscretizedLeadModel> {
    build_model_scaled(device, bath, n_modes, lead_bandwidth, 1.0)
}

/// As [`build_model`] with every dot-lead coupling multiplied by `coupling_scale`
/// (zero decouples the dots, which the device parameters cannot express).
pub fn build_model_scaled(
    device: &DeviceParams,
    bath: &BathParams,
    n_modes: usize,
    lead_bandwidth: f64,
    coupling_scale: f64,
) -> Result<DiscretizedLeadModel> {
    if n_modes < 2 {
        return Err(Error::InvalidModel(format!("need at least 2 modes per lead, got {n_modes}")));
    }
    if !(lead_bandwidth >= bath.cutoff) {
        return Err(Error::InvalidModel(format!(
            "lead half-bandwidth {lead_bandwidth} is below the cutoff {}",
            bath.cutoff
        )));
    }
    let de = 2.0 * lead_bandwidth / n_modes as f64;
    let mode_energies: Vec<f64> = (0..n_modes)
        .map(|k| -lead_bandwidth + de * (k as f64 + 0.5))
        .collect();

    // V*_1L = V_2L = |V_L| e^{i phi/4},  V_1R = V*_2R = |V_R| e^{i phi/4}.
    let q = C64::from_polar(1.0, 0.25 * device.phi);
    let vl = coupling_scale * (device.gamma_l * de / (2.0 * PI)).sqrt();
    let vr = coupling_scale * (device.gamma_r * de / (2.0 * PI)).sqrt();
    let couplings = [[q.conj() * vl, q * vr], [q * vl, q.conj() * vr]];

    let n = 2 + 2 * n_modes;
    let mut h = DMatrix::<C64>::zeros(n, n);
    h[(0, 0)] = C64::new(device.e1, 0.0);
    h[(1, 1)] = C64::new(device.e2, 0.0);
    let mut initial = DVector::<f64>::zeros(n);
    for (lead, mu) in [bath.mu_l, bath.mu_r].into_iter().enumerate() {
        for (k, &eps) in mode_energies.iter().enumerate() {
            let m = 2 + lead * n_modes + k;
            h[(m, m)] = C64::new(eps, 0.0);
            initial[m] = fermi(eps - mu, bath.temperature);
            // H_T = sum V_j c^dagger a_j + h.c.
            for j in 0..2 {
                h[(m, j)] = couplings[j][lead];
                h[(j, m)] = couplings[j][lead].conj();
            }
        }
    }
    let eig = h.clone().symmetric_eigen();
    Ok(DiscretizedLeadModel {
        n_modes,
        half_bandwidth: lead_bandwidth,
        mode_energies,
        couplings,
        hamiltonian: h,
        initial,
        eigenvalues: eig.eigenvalues,
        eigenvectors: eig.eigenvectors,
    })
}

impl DiscretizedLeadModel {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_bandwidth / self.n_modes as f64
    }

    pub fn recurrence_time(&self) -> f64 {
        2.0 * PI / self.spacing()
    }

    pub fn hamiltonian(&self) -> &DMatrix<C64> {
        &self.hamiltonian
    }

    pub fn initial(&self) -> CorrelationMatrix {
        CorrelationMatrix {
            c: DMatrix::from_diagonal(&self.initial.map(|x| C64::new(x, 0.0))),
            time: 0.0,
        }
    }

    /// Rows `rows` of `e^{-iHt}`.
    fn propagator_rows(&self, rows: std::ops::Range<usize>, t: f64) -> DMatrix<C64> {
        let q = &self.eigenvectors;
        let phases = self.eigenvalues.map(|e| C64::from_polar(1.0, -e * t));
        let mut left = q.rows(rows.start, rows.len()).into_owned();
        for (j, mut col) in left.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        left * q.adjoint()
    }

    /// `C(t) = e^{-iHt} C(0) e^{iHt}` for the whole system.
    pub fn evolve(&self, t: f64) -> Result<CorrelationMatrix> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let n = self.hamiltonian.nrows();
        let u = self.propagator_rows(0..n, t);
        let mut uc = u.clone();
        for (j, mut col) in uc.column_iter_mut().enumerate() {
            col *= C64::new(self.initial[j], 0.0);
        }
        Ok(CorrelationMatrix {
            c: uc * u.adjoint(),
            time: t,
        })
    }

    /// The dot block of `C(t)` only, in `O(n^2)`. Refuses times beyond half the
    /// recurrence time, where the finite leads start refeeding the dots.
    pub fn dot_occupation(&self, t: f64) -> Result<OccupationMatrix> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let recurrence = self.recurrence_time();
        if t >= 0.5 * recurrence {
            return Err(Error::RecurrenceExceeded { t, recurrence });
        }
        let r = self.propagator_rows(0..2, t);
        let mut v = ComplexMat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                v[(i, j)] = (0..r.ncols())
                    .map(|m| r[(i, m)] * r[(j, m)].conj() * self.initial[m])
                    .sum();
            }
        }
        Ok(OccupationMatrix::new(v, SampleTime::At(t)))
    }

    pub fn rho_at(&self, t: f64) -> Result<ReducedDensityMatrix> {
        assemble_rho(&self.dot_occupation(t)?)
    }
}

/// Dot density matrix from a full correlation matrix.
pub fn reduced_rho(c: &CorrelationMatrix) -> Result<ReducedDensityMatrix> {
    assemble_rho(&OccupationMatrix::new(c.dot_block(), SampleTime::At(c.time)))
}
