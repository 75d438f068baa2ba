//! Dense 2x2 complex matrices and the closed-form matrix functions the
//! propagator needs.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major 2x2 complex matrix. Indices are zero-based: `m[(1, 0)]` is the
/// (2,1) element in physics notation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat2(pub [[C64; 2]; 2]);

impl ComplexMat2 {
    pub const ZERO: Self = Self([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Self = Self([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Self([[a11, a12], [a21, a22]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Self([[a, ZERO], [ZERO, b]])
    }

    pub fn scalar(a: C64) -> Self {
        Self::diag(a, a)
    }

    /// Pauli matrices, x, y, z.
    pub fn pauli() -> [Self; 3] {
        let i = C64::i();
        [
            Self::new(ZERO, ONE, ONE, ZERO),
            Self::new(ZERO, -i, i, ZERO),
            Self::new(ONE, ZERO, ZERO, -ONE),
        ]
    }

    /// `x y^dagger`.
    pub fn outer(x: [C64; 2], y: [C64; 2]) -> Self {
        Self([
            [x[0] * y[0].conj(), x[0] * y[1].conj()],
            [x[1] * y[0].conj(), x[1] * y[1].conj()],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.0;
        Self([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        let a = &self.0;
        Some(Self([[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]))
    }

    /// Solves `self x = b` by Cramer's rule.
    pub fn solve(&self, b: [C64; 2]) -> Option<[C64; 2]> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        let a = &self.0;
        Some([
            (a[1][1] * b[0] - a[0][1] * b[1]) / d,
            (a[0][0] * b[1] - a[1][0] * b[0]) / d,
        ])
    }

    pub fn mul_vec(&self, x: [C64; 2]) -> [C64; 2] {
        let a = &self.0;
        [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
    }

    pub fn scale(&self, k: C64) -> Self {
        let a = &self.0;
        Self([[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]])
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - A^dagger|` over the elements.
    pub fn hermitian_deviation(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let h = (*self + self.adjoint()).scale_re(0.5);
        let a = h.0[0][0].re;
        let d = h.0[1][1].re;
        let b = h.0[0][1].norm();
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - r, mean + r]
    }

    /// Eigenvalues (not ordered).
    pub fn eigenvalues(&self) -> [C64; 2] {
        let sp = Spectral::of(self);
        [sp.c0 + sp.s, sp.c0 - sp.s]
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let g = self.adjoint() * *self;
        g.hermitian_eigenvalues()[1].max(0.0).sqrt()
    }

    /// `exp(-self * tau)`.
    pub fn exp_neg(&self, tau: f64) -> Self {
        let sp = Spectral::of(self);
        let x2 = sp.q * tau * tau;
        let (fsym, fdiv) = if x2.norm() < 1e-6 {
            let e = (-sp.c0 * tau).exp();
            (
                e * (ONE + x2 / 2.0 + x2 * x2 / 24.0),
                -e * tau * (ONE + x2 / 6.0 + x2 * x2 / 120.0),
            )
        } else {
            let ep = (-(sp.c0 + sp.s) * tau).exp();
            let em = (-(sp.c0 - sp.s) * tau).exp();
            ((ep + em) / 2.0, (ep - em) / (2.0 * sp.s))
        };
        Self::scalar(fsym) + sp.n.scale(fdiv)
    }

    /// `int_0^t exp(-self * tau) d tau`, finite even when `self` is singular.
    pub fn integral_exp_neg(&self, t: f64) -> Self {
        if t == 0.0 {
            return Self::ZERO;
        }
        let sp = Spectral::of(self);
        let f = |z: C64, n: usize| -> C64 {
            // n-th derivative of z -> (1 - exp(-z t)) / z.
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            exp_moments(z * t)[n] * t.powi(n as i32 + 1) * sign
        };
        let lp = sp.c0 + sp.s;
        let lm = sp.c0 - sp.s;
        let fsym = (f(lp, 0) + f(lm, 0)) / 2.0;
        let fdiv = if (sp.q * t * t).norm() < 1e-6 {
            f(sp.c0, 1) + f(sp.c0, 3) * sp.q / 6.0 + f(sp.c0, 5) * sp.q * sp.q / 120.0
        } else {
            (f(lp, 0) - f(lm, 0)) / (2.0 * sp.s)
        };
        Self::scalar(fsym) + sp.n.scale(fdiv)
    }
}

/// `A = c0 I + N` with `N^2 = q I`, `s = sqrt(q)`; eigenvalues `c0 +- s`.
struct Spectral {
    c0: C64,
    n: ComplexMat2,
    q: C64,
    s: C64,
}

impl Spectral {
    fn of(a: &ComplexMat2) -> Self {
        let c0 = a.trace() / 2.0;
        let n = *a - ComplexMat2::scalar(c0);
        let h = (a.0[0][0] - a.0[1][1]) / 2.0;
        let q = h * h + a.0[0][1] * a.0[1][0];
        Self { c0, n, q, s: q.sqrt() }
    }
}

/// `I_n(x) = int_0^1 s^n exp(-x s) ds` for `n = 0..=5`, assuming `Re x >= 0`.
fn exp_moments(x: C64) -> [C64; 6] {
    let mut out = [ZERO; 6];
    if x.norm() < 2.0 {
        for (n, slot) in out.iter_mut().enumerate() {
            let mut term = ONE; // (-x)^k / k!
            let mut acc = ZERO;
            for k in 0..60 {
                let add = term / (n + k + 1) as f64;
                acc += add;
                if add.norm() < 1e-18 * acc.norm().max(1e-300) {
                    break;
                }
                term = term * (-x) / (k + 1) as f64;
            }
            *slot = acc;
        }
    } else {
        let e = (-x).exp();
        out[0] = (ONE - e) / x;
        for n in 1..6 {
            out[n] = (out[n - 1] * n as f64 - e) / x;
        }
    }
    out
}

impl Index<(usize, usize)> for ComplexMat2 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMat2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMat2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl AddAssign for ComplexMat2 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for ComplexMat2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for ComplexMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl Mul for ComplexMat2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}
