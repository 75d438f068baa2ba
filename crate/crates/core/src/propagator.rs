//! Retarded propagator of the dot pair and the equal-time occupation matrix.
//!
//! With the leads integrated out in the wide-band limit, the dot amplitudes
//! decay with the generator
//!
//! ```text
//! M = i diag(E1, E2) + 1/2 [[Gamma, Gamma_c], [Gamma_c*, Gamma]]
//! ```
//!
//! so that `u(tau) = exp(-M tau)`. The occupation matrix is
//!
//! ```text
//! v(t) = int dw/2pi  g(t,w) [sum_a f_a(w) Gamma_a W_a] g(t,w)^dagger
//! g(t,w) = int_0^t dtau exp(-i w (t - tau)) u(tau)
//! ```
//!
//! with `W_a = w_a w_a^dagger`, `w_L = (1, e^{-i phi/2})`, `w_R = (1, e^{+i phi/2})`.
//! Element `v[(i, j)]` is `<a_j^dagger a_i>`, so `v[(1, 0)]` is rho_21.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mat2::ComplexMat2;
use crate::params::{BathParams, DeviceParams};
use crate::quadrature::{integrate, QuadratureSpec};

/// How the linewidths enter the decay generator. Only `HalfLinewidth` is
/// physical; the other exists to demonstrate that the consistency checks
/// catch a factor-of-two error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayConvention {
    #[default]
    HalfLinewidth,
    FullLinewidth,
}

/// Generator `M` of the retarded propagator `u(tau) = exp(-M tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayMatrix {
    pub m: ComplexMat2,
}

impl DecayMatrix {
    /// Resonance frequencies: imaginary parts of the eigenvalues of `M`.
    pub fn resonances(&self) -> [f64; 2] {
        self.m.eigenvalues().map(|z| z.im)
    }
}

pub fn decay_matrix(device: &DeviceParams) -> DecayMatrix {
    decay_matrix_with(device, DecayConvention::HalfLinewidth)
}

pub fn decay_matrix_with(device: &DeviceParams, convention: DecayConvention) -> DecayMatrix {
    let k = match convention {
        DecayConvention::HalfLinewidth => 0.5,
        DecayConvention::FullLinewidth => 1.0,
    };
    let g = C64::new(k * device.gamma(), 0.0);
    let gc = device.gamma_c() * k;
    let m = ComplexMat2::new(
        C64::new(0.0, device.e1) + g,
        gc,
        gc.conj(),
        C64::new(0.0, device.e2) + g,
    );
    DecayMatrix { m }
}

/// Lead coupling vectors `w_L`, `w_R` with `W_a = w_a w_a^dagger`.
pub fn lead_vectors(device: &DeviceParams) -> [[C64; 2]; 2] {
    let (c, s) = device.half_angle();
    let one = C64::new(1.0, 0.0);
    [[one, C64::new(c, -s)], [one, C64::new(c, s)]]
}

/// `W_L` (carrying `e^{+i phi/2}` at (1,2)) and `W_R`.
pub fn coupling_matrices(device: &DeviceParams) -> [ComplexMat2; 2] {
    lead_vectors(device).map(|w| ComplexMat2::outer(w, w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleTime {
    At(f64),
    Steady,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationMatrix {
    pub v: ComplexMat2,
    pub time: SampleTime,
    /// Quadrature error estimate (max-norm).
    pub error: f64,
}

impl OccupationMatrix {
    pub fn new(v: ComplexMat2, time: SampleTime) -> Self {
        Self { v, time, error: 0.0 }
    }

    pub fn zero() -> Self {
        Self::new(ComplexMat2::ZERO, SampleTime::At(0.0))
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.v.hermitian_eigenvalues()
    }

    /// Checks Hermiticity to `herm_tol` and occupations within `[-eig_tol, 1 + eig_tol]`.
    pub fn check(&self, herm_tol: f64, eig_tol: f64) -> Result<()> {
        let deviation = self.v.hermitian_deviation();
        if deviation > herm_tol {
            return Err(Error::NotHermitian { deviation });
        }
        let [min, max] = self.eigenvalues();
        if min < -eig_tol || max > 1.0 + eig_tol {
            return Err(Error::InvalidOccupation { min, max });
        }
        Ok(())
    }
}

/// Per-device propagator data, shared by every time and frequency.
#[derive(Debug, Clone)]
pub struct Propagator {
    device: DeviceParams,
    decay: DecayMatrix,
    leads: [[C64; 2]; 2],
    rates: [f64; 2],
}

impl Propagator {
    pub fn new(device: &DeviceParams) -> Self {
        Self::with_convention(device, DecayConvention::HalfLinewidth)
    }

    pub fn with_convention(device: &DeviceParams, convention: DecayConvention) -> Self {
        Self {
            device: *device,
            decay: decay_matrix_with(device, convention),
            leads: lead_vectors(device),
            rates: [device.gamma_l, device.gamma_r],
        }
    }

    pub fn device(&self) -> &DeviceParams {
        &self.device
    }

    pub fn decay(&self) -> &DecayMatrix {
        &self.decay
    }

    /// `u(tau) = exp(-M tau)`.
    pub fn retarded_u(&self, tau: f64) -> Result<ComplexMat2> {
        if tau < 0.0 {
            return Err(Error::NegativeTime(tau));
        }
        Ok(self.decay.m.exp_neg(tau))
    }

    /// `g(t, w) = e^{-i w t} int_0^t exp(-(M - i w) tau) d tau`.
    pub fn windowed_u(&self, t: f64, omega: f64) -> ComplexMat2 {
        let a = self.decay.m - ComplexMat2::scalar(C64::new(0.0, omega));
        a.integral_exp_neg(t).scale(C64::from_polar(1.0, -omega * t))
    }

    /// `G(w) = (M - i w)^{-1}`, the `t -> infinity` limit of `e^{i w t} g(t, w)`.
    pub fn steady_green(&self, omega: f64) -> Option<ComplexMat2> {
        (self.decay.m - ComplexMat2::scalar(C64::new(0.0, omega))).inverse()
    }

    /// `sum_a Gamma_a W_a`.
    fn injection(&self) -> ComplexMat2 {
        let mut k = ComplexMat2::ZERO;
        for (w, g) in self.leads.iter().zip(self.rates) {
            k += ComplexMat2::outer(*w, *w).scale_re(g);
        }
        k
    }

    fn breakpoints(&self, bath: &BathParams) -> Vec<f64> {
        let d = bath.cutoff;
        let mut pts = vec![-d, d, 0.0, bath.mu_l, bath.mu_r];
        pts.extend(self.decay.resonances());
        pts.retain(|x| x.abs() <= d);
        pts
    }

    fn accumulate(&self, bath: &BathParams, omega: f64, amp: impl Fn(&[C64; 2]) -> [C64; 2]) -> [f64; 8] {
        let fs = [bath.fermi_l(omega), bath.fermi_r(omega)];
        let mut acc = ComplexMat2::ZERO;
        for ((w, g), f) in self.leads.iter().zip(self.rates).zip(fs) {
            let weight = f * g;
            if weight == 0.0 {
                continue;
            }
            let x = amp(w);
            acc += ComplexMat2::outer(x, x).scale_re(weight);
        }
        flatten(&acc.scale_re(1.0 / (2.0 * PI)))
    }

    /// `v(t)` by frequency quadrature of the closed-form windowed propagator.
    pub fn occupation_v(&self, bath: &BathParams, t: f64, quad: &QuadratureSpec) -> Result<OccupationMatrix> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(OccupationMatrix::zero());
        }
        let integrand = |omega: f64| {
            let g = self.windowed_u(t, omega);
            self.accumulate(bath, omega, |w| g.mul_vec(*w))
        };
        // Seed panels no wider than one period of e^{i w t}: on longer panels
        // the whole-vs-halves estimate can miss the oscillation entirely.
        let pts = subdivide(&self.breakpoints(bath), 2.0 * PI / t);
        let r = integrate(integrand, &pts, quad)?;
        let mut v = unflatten(&r.value);
        if quad.tail_correction {
            v += self.transient_tail(bath.cutoff, t, quad)?;
        }
        Ok(OccupationMatrix {
            v,
            time: SampleTime::At(t),
            error: r.error,
        })
    }

    /// `v(infinity) = int dw/2pi sum_a f_a Gamma_a G W_a G^dagger`.
    pub fn steady_v(&self, bath: &BathParams, quad: &QuadratureSpec) -> Result<OccupationMatrix> {
        let integrand = |omega: f64| {
            let a = self.decay.m - ComplexMat2::scalar(C64::new(0.0, omega));
            self.accumulate(bath, omega, |w| match a.solve(*w) {
                Some(x) => x,
                // Exactly on a decoupled resonance; the coupled part is smooth there.
                None => {
                    let eps = 1e-12 * (1.0 + omega.abs());
                    let a = self.decay.m - ComplexMat2::scalar(C64::new(0.0, omega + eps));
                    a.solve(*w).unwrap_or([C64::new(0.0, 0.0); 2])
                }
            })
        };
        let r = integrate(integrand, &self.breakpoints(bath), quad)?;
        let mut v = unflatten(&r.value);
        if quad.tail_correction {
            v += self.steady_tail(bath.cutoff);
        }
        Ok(OccupationMatrix {
            v,
            time: SampleTime::Steady,
            error: r.error,
        })
    }

    /// `int_{-inf}^{-D} dw/2pi G K G^dagger` with every lead level below
    /// `-D` filled, as a double power series in `M / D`.
    pub fn steady_tail(&self, cutoff: f64) -> ComplexMat2 {
        let k = self.injection();
        let d = cutoff;
        let i = C64::i();
        let a = self.decay.m.scale(i / d);
        let b = self.decay.m.adjoint().scale(-i / d);
        const ORDER: usize = 24;
        let mut a_pow = vec![ComplexMat2::IDENTITY];
        let mut b_pow = vec![ComplexMat2::IDENTITY];
        for n in 1..=ORDER {
            a_pow.push(a_pow[n - 1] * a);
            b_pow.push(b_pow[n - 1] * b);
        }
        let mut acc = ComplexMat2::ZERO;
        for n in 0..=ORDER {
            for m in 0..=(ORDER - n) {
                acc += (a_pow[n] * k * b_pow[m]).scale_re(1.0 / ((n + m + 1) as f64 * d));
            }
        }
        acc.scale_re(1.0 / (2.0 * PI))
    }

    /// Leading `1/w^2` estimate of the transient part of the tail beyond `-D`,
    /// added to the full steady tail.
    fn transient_tail(&self, cutoff: f64, t: f64, quad: &QuadratureSpec) -> Result<ComplexMat2> {
        let k = self.injection();
        let u = self.decay.m.exp_neg(t);
        let j = tail_oscillation(cutoff, t, quad)?;
        let transient = (u * k * u.adjoint()).scale_re(1.0 / cutoff)
            - (k * u.adjoint()).scale(j)
            - (u * k).scale(j.conj());
        Ok(self.steady_tail(cutoff) + transient.scale_re(1.0 / (2.0 * PI)))
    }
}

/// `J(t) = int_D^inf e^{i x t} / x^2 dx`, evaluated on the rotated contour
/// `x = D + i y` where the integrand decays exponentially.
fn tail_oscillation(cutoff: f64, t: f64, quad: &QuadratureSpec) -> Result<C64> {
    if t == 0.0 {
        return Ok(C64::new(1.0 / cutoff, 0.0));
    }
    let d = cutoff;
    let f = |s: f64| {
        let z = C64::new(d, s / t);
        let v = (-s).exp() / (z * z);
        [v.re, v.im]
    };
    let knee = (d * t).min(1.0);
    let spec = QuadratureSpec {
        abs_tol: quad.abs_tol * 1e-3 * d * d,
        ..*quad
    };
    let r = integrate(f, &[0.0, 0.1 * knee, knee, 5.0, 50.0], &spec)?;
    let inner = C64::new(r.value[0], r.value[1]);
    Ok(C64::i() * C64::from_polar(1.0, d * t) * inner / t)
}

/// Sorted breakpoints with every gap split into pieces no longer than `max_width`.
fn subdivide(points: &[f64], max_width: f64) -> Vec<f64> {
    let mut pts = points.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / pieces as f64;
        out.extend((0..pieces).map(|k| w[0] + h * k as f64));
    }
    out.extend(pts.last());
    out
}

fn flatten(m: &ComplexMat2) -> [f64; 8] {
    let a = &m.0;
    [
        a[0][0].re, a[0][0].im, a[0][1].re, a[0][1].im, a[1][0].re, a[1][0].im, a[1][1].re, a[1][1].im,
    ]
}

fn unflatten(x: &[f64; 8]) -> ComplexMat2 {
    ComplexMat2::new(
        C64::new(x[0], x[1]),
        C64::new(x[2], x[3]),
        C64::new(x[4], x[5]),
        C64::new(x[6], x[7]),
    )
}

pub fn retarded_u(device: &DeviceParams, tau: f64) -> Result<ComplexMat2> {
    Propagator::new(device).retarded_u(tau)
}

pub fn windowed_u(device: &DeviceParams, t: f64, omega: f64) -> ComplexMat2 {
    Propagator::new(device).windowed_u(t, omega)
}

pub fn occupation_v(
    device: &DeviceParams,
    bath: &BathParams,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<OccupationMatrix> {
    Propagator::new(device).occupation_v(bath, t, quad)
}

pub fn steady_v(device: &DeviceParams, bath: &BathParams, quad: &QuadratureSpec) -> Result<OccupationMatrix> {
    Propagator::new(device).steady_v(bath, quad)
}
