//! Closed-form steady-state results: the inter-dot coherence at zero
//! temperature and symmetric bias, its large-bias limit, the transmission
//! coefficient and the Landauer current.

use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::{BathParams, DeviceParams};
use crate::quadrature::{integrate, QuadratureSpec};

/// `gamma(phi)` and `Gamma_pm(phi) = (Gamma +- gamma) / 2`. Complex when the
/// detuning exceeds the interference-reduced linewidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralScales {
    pub gamma_phi: C64,
    pub gamma_plus: C64,
    pub gamma_minus: C64,
}

impl SpectralScales {
    pub fn of(device: &DeviceParams) -> Self {
        let g = device.gamma();
        let gamma_sq = gamma_squared(device);
        let gamma_phi = C64::new(gamma_sq, 0.0).sqrt();
        let gamma_plus = (gamma_phi + g) * 0.5;
        // Gamma_- = Gamma_+ Gamma_- / Gamma_+ avoids cancellation in (Gamma - gamma) / 2.
        let product = 0.25 * gap(device);
        let gamma_minus = if gamma_plus.norm() > 0.0 {
            product / gamma_plus
        } else {
            C64::new(0.0, 0.0)
        };
        Self {
            gamma_phi,
            gamma_plus,
            gamma_minus,
        }
    }
}

/// `gamma^2 = Gamma^2 cos^2(phi/2) + dGamma^2 sin^2(phi/2) - dE^2`.
pub fn gamma_squared(device: &DeviceParams) -> f64 {
    let (c, s) = device.half_angle();
    let g = device.gamma();
    let dg = device.delta_gamma();
    let de = device.delta_e();
    g * g * c * c + dg * dg * s * s - de * de
}

/// `Gamma^2 - gamma^2 = (Gamma^2 - dGamma^2) sin^2(phi/2) + dE^2 >= 0`.
fn gap(device: &DeviceParams) -> f64 {
    let (_, s) = device.half_angle();
    let g = device.gamma();
    let dg = device.delta_gamma();
    let de = device.delta_e();
    (g * g - dg * dg) * s * s + de * de
}

/// Steady-state `rho_21` at zero temperature with `mu_L = eV/2 = -mu_R`, for
/// levels placed symmetrically about zero (`E1 = -E2`).
///
/// At `phi = 2 pi k` with `E1 = E2` one dot mode decouples from both leads and
/// stays empty; the returned value is the exact steady state reached from the
/// empty dot, `cos(phi/2) [dGamma/Gamma atan(eV/2Gamma) + pi/2] / 2pi`.
pub fn steady_rho21_closed(device: &DeviceParams, bias: f64) -> Result<C64> {
    let sum = device.e1 + device.e2;
    if sum.abs() > 1e-12 * (1.0 + device.e1.abs()) {
        return Err(Error::NotCentred { sum });
    }
    let (c, s) = device.half_angle();
    let g = device.gamma();
    let dg = device.delta_gamma();
    let de = device.delta_e();
    let x = 0.5 * bias;
    let i = C64::i();

    if gap(device) == 0.0 {
        if s == 0.0 {
            return Ok(C64::new(c * (dg / g * (x / g).atan() + 0.5 * PI) / (2.0 * PI), 0.0));
        }
        // One lead decoupled: the vanishing scale only contributes atan(x / 0+).
        let sc = SpectralScales::of(device);
        let a = (C64::new(x, 0.0) / sc.gamma_plus).atan() + 0.5 * PI * x.signum();
        return Ok(a / (2.0 * PI) * (C64::new(dg / g * c, 0.0) - i * s));
    }

    let sc = SpectralScales::of(device);
    let atan_over = |scale: C64| (C64::new(x, 0.0) / scale).atan();
    let first = (atan_over(sc.gamma_plus) + atan_over(sc.gamma_minus)) / (2.0 * PI)
        * (C64::new(dg / g * c, 0.0) - i * s);
    if de == 0.0 {
        return Ok(first);
    }
    // [h(Gamma_+) - h(Gamma_-)] / gamma with h(y) = atan(x/y) / y.
    let h = |y: C64| atan_over(y) / y;
    let dd = if sc.gamma_phi.norm() > 1e-4 * g {
        (h(sc.gamma_plus) - h(sc.gamma_minus)) / sc.gamma_phi
    } else {
        let y = C64::new(0.5 * g, 0.0);
        let xs = C64::new(x, 0.0);
        -atan_over(y) / (y * y) - xs / (y * (y * y + xs * xs))
    };
    let brace = C64::new((-(g * g - dg * dg) * s + dg * de * c) / g, -de * s);
    Ok(first + dd * de / (4.0 * PI) * brace)
}

/// [`steady_rho21_closed`] for a bath, which must be at zero temperature with
/// `mu_L = -mu_R`.
pub fn steady_rho21_closed_for(device: &DeviceParams, bath: &BathParams) -> Result<C64> {
    if bath.temperature != 0.0 || !bath.is_symmetric_bias() {
        return Err(Error::NotSymmetricBias);
    }
    steady_rho21_closed(device, bath.bias())
}

/// Large-bias limit of the steady coherence for degenerate dots.
pub fn large_bias_rho21(device: &DeviceParams) -> Result<C64> {
    let de = device.delta_e();
    if de != 0.0 {
        return Err(Error::NotDegenerate { delta_e: de });
    }
    let (c, s) = device.half_angle();
    let ratio = device.delta_gamma() / device.gamma();
    if s == 0.0 {
        return Ok(C64::new(0.25 * c * (1.0 + ratio), 0.0));
    }
    Ok(C64::new(0.5 * ratio * c, -0.5 * s))
}

/// Transmission coefficient without the unitarity check.
pub fn transmission_unchecked(device: &DeviceParams, omega: f64) -> f64 {
    let (c, s) = device.half_angle();
    let g2 = device.gamma().powi(2);
    let prefactor = g2 - device.delta_gamma().powi(2);
    if prefactor == 0.0 {
        return 0.0;
    }
    let de = device.delta_e();
    let w2 = omega * omega;
    let p = 0.25 * gap(device);
    if p == 0.0 {
        // dE = 0 and cos^2(phi/2) = 1: the omega^2 factor cancels against Gamma_-^2 = 0.
        return prefactor * c * c / (w2 + g2);
    }
    let gamma_sq = gamma_squared(device);
    let numerator = prefactor * (w2 * c * c + 0.25 * de * de * s * s);
    let denominator = w2 * w2 + w2 * 0.5 * (g2 + gamma_sq) + p * p;
    numerator / denominator
}

pub fn transmission(device: &DeviceParams, omega: f64) -> Result<f64> {
    let value = transmission_unchecked(device, omega);
    if !(-1e-12..=1.0 + 1e-12).contains(&value) || value.is_nan() {
        return Err(Error::UnitarityViolation {
            omega,
            phi: device.phi,
            value,
        });
    }
    Ok(value)
}

/// `I = int dw/2pi [f_L - f_R] T(w, phi)`; positive for flow from L to R.
pub fn steady_current(device: &DeviceParams, bath: &BathParams, quad: &QuadratureSpec) -> Result<f64> {
    if bath.mu_l == bath.mu_r {
        return Ok(0.0);
    }
    let bad = Cell::new(None);
    let integrand = |omega: f64| {
        let t = transmission_unchecked(device, omega);
        if !(-1e-12..=1.0 + 1e-12).contains(&t) && bad.get().is_none() {
            bad.set(Some((omega, t)));
        }
        [(bath.fermi_l(omega) - bath.fermi_r(omega)) * t / (2.0 * PI)]
    };
    let (lo, hi) = if bath.temperature == 0.0 {
        (bath.mu_l.min(bath.mu_r), bath.mu_l.max(bath.mu_r))
    } else {
        (-bath.cutoff, bath.cutoff)
    };
    let mut pts = vec![lo, hi, bath.mu_l, bath.mu_r, 0.0];
    let g = device.gamma();
    pts.extend([-g, g]);
    pts.retain(|x| (lo..=hi).contains(x));
    let r = integrate(integrand, &pts, quad)?;
    if let Some((omega, value)) = bad.get() {
        return Err(Error::UnitarityViolation {
            omega,
            phi: device.phi,
            value,
        });
    }
    Ok(r.value[0])
}
