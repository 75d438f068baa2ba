//! Model and reservoir parameters.
//!
//! Units: hbar = e = k_B = 1. Every energy shares one unit (normally the total
//! linewidth Gamma) and times are measured in its inverse.

use std::f64::consts::PI;
use std::fmt;

/// Static device definition: two uncoupled dot levels, their tunnelling
/// linewidths to the left and right leads, and the Aharonov-Bohm phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams {
    pub e1: f64,
    pub e2: f64,
    pub gamma_l: f64,
    pub gamma_r: f64,
    /// AB phase `2 pi Phi / Phi_0`.
    pub phi: f64,
}

impl DeviceParams {
    pub fn new(e1: f64, e2: f64, gamma_l: f64, gamma_r: f64, phi: f64) -> Self {
        Self {
            e1,
            e2,
            gamma_l,
            gamma_r,
            phi,
        }
    }

    /// Degenerate levels at zero energy with `Gamma = 1` split as
    /// `(1 + asymmetry) / 2` and `(1 - asymmetry) / 2`.
    pub fn degenerate(asymmetry: f64, phi: f64) -> Self {
        Self::new(0.0, 0.0, 0.5 * (1.0 + asymmetry), 0.5 * (1.0 - asymmetry), phi)
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    /// Total linewidth `Gamma_L + Gamma_R`.
    pub fn gamma(&self) -> f64 {
        self.gamma_l + self.gamma_r
    }

    /// Coupling asymmetry `Gamma_L - Gamma_R`.
    pub fn delta_gamma(&self) -> f64 {
        self.gamma_l - self.gamma_r
    }

    /// Level detuning `E1 - E2`.
    pub fn delta_e(&self) -> f64 {
        self.e1 - self.e2
    }

    /// `(cos(phi/2), sin(phi/2))`, with values at multiples of `pi/2` made
    /// exact so that the decoupled-mode points are exactly degenerate.
    pub fn half_angle(&self) -> (f64, f64) {
        let (s, c) = (0.5 * self.phi).rem_euclid(2.0 * PI).sin_cos();
        let eps = 8.0 * f64::EPSILON;
        if s.abs() < eps {
            (c.signum(), 0.0)
        } else if c.abs() < eps {
            (0.0, s.signum())
        } else {
            (c, s)
        }
    }

    /// Interference coupling `Gamma cos(phi/2) + i dGamma sin(phi/2)`.
    pub fn gamma_c(&self) -> num_complex::Complex64 {
        let (c, s) = self.half_angle();
        num_complex::Complex64::new(self.gamma() * c, self.delta_gamma() * s)
    }

    /// Multiplies every energy by `factor` (phase untouched).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            e1: self.e1 * factor,
            e2: self.e2 * factor,
            gamma_l: self.gamma_l * factor,
            gamma_r: self.gamma_r * factor,
            phi: self.phi,
        }
    }
}

/// Converts a flux in units of the flux quantum `h/e` into the AB phase.
pub fn flux_to_phase(flux_over_quantum: f64) -> f64 {
    2.0 * PI * flux_over_quantum
}

/// Reservoir chemical potentials, temperature and the half-width `D` of the
/// frequency window used for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub mu_l: f64,
    pub mu_r: f64,
    pub temperature: f64,
    pub cutoff: f64,
}

pub const DEFAULT_CUTOFF: f64 = 50.0;

impl BathParams {
    pub fn new(mu_l: f64, mu_r: f64, temperature: f64, cutoff: f64) -> Self {
        Self {
            mu_l,
            mu_r,
            temperature,
            cutoff,
        }
    }

    /// `mu_L = eV/2 = -mu_R` with the default cutoff.
    pub fn symmetric(bias: f64, temperature: f64) -> Self {
        Self::new(0.5 * bias, -0.5 * bias, temperature, DEFAULT_CUTOFF)
    }

    pub fn with_cutoff(self, cutoff: f64) -> Self {
        Self { cutoff, ..self }
    }

    pub fn bias(&self) -> f64 {
        self.mu_l - self.mu_r
    }

    pub fn is_symmetric_bias(&self) -> bool {
        (self.mu_l + self.mu_r).abs() <= 1e-14 * (1.0 + self.mu_l.abs())
    }

    pub fn fermi_l(&self, omega: f64) -> f64 {
        fermi(omega - self.mu_l, self.temperature)
    }

    pub fn fermi_r(&self, omega: f64) -> f64 {
        fermi(omega - self.mu_r, self.temperature)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mu_l: self.mu_l * factor,
            mu_r: self.mu_r * factor,
            temperature: self.temperature * factor,
            cutoff: self.cutoff * factor,
        }
    }
}

/// Fermi-Dirac occupation of a level `x = omega - mu` above the chemical
/// potential. `temperature == 0` is a sharp step with `f(0) = 1/2`.
pub fn fermi(x: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return if x < 0.0 {
            1.0
        } else if x > 0.0 {
            0.0
        } else {
            0.5
        };
    }
    let y = x / temperature;
    if y > 0.0 {
        let e = (-y).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + y.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NonFinite,
    NegativeLinewidth,
    GammaNotPositive,
    NegativeTemperature,
    CutoffNotPositive,
    CutoffTooSmall,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::NonFinite => "parameters must be finite",
            Violation::NegativeLinewidth => "linewidths must be non-negative",
            Violation::GammaNotPositive => "Γ must be positive",
            Violation::NegativeTemperature => "temperature must be non-negative",
            Violation::CutoffNotPositive => "cutoff must be positive",
            Violation::CutoffTooSmall => "cutoff too small: need D > max(|mu_L|, |mu_R|) + 10 Γ",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, v: Violation) -> bool {
        self.violations.contains(&v)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&msgs.join("; "))
    }
}

pub fn validate(device: &DeviceParams, bath: &BathParams) -> ValidationReport {
    let mut violations = Vec::new();
    let all = [
        device.e1,
        device.e2,
        device.gamma_l,
        device.gamma_r,
        device.phi,
        bath.mu_l,
        bath.mu_r,
        bath.temperature,
        bath.cutoff,
    ];
    if all.iter().any(|x| !x.is_finite()) {
        violations.push(Violation::NonFinite);
        return ValidationReport { violations };
    }
    if device.gamma_l < 0.0 || device.gamma_r < 0.0 {
        violations.push(Violation::NegativeLinewidth);
    }
    if device.gamma() <= 0.0 {
        violations.push(Violation::GammaNotPositive);
    }
    if bath.temperature < 0.0 {
        violations.push(Violation::NegativeTemperature);
    }
    if bath.cutoff <= 0.0 {
        violations.push(Violation::CutoffNotPositive);
    } else if bath.cutoff <= bath.mu_l.abs().max(bath.mu_r.abs()) + 10.0 * device.gamma() {
        violations.push(Violation::CutoffTooSmall);
    }
    ValidationReport { violations }
}
