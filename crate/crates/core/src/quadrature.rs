//! Globally adaptive Gauss-Legendre quadrature for vector-valued integrands.
//!
//! Each panel is integrated with a fixed-order rule on the whole interval and
//! on its two halves; the difference is the panel's error estimate. The panel
//! with the largest estimate is bisected until the summed estimate falls
//! below `max(abs_tol, rel_tol * |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Add the analytic contribution of frequencies beyond the cutoff.
    pub tail_correction: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            max_panels: 50_000,
            tail_correction: false,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tail(self) -> Self {
        Self {
            tail_correction: true,
            ..self
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<const K: usize>(&self, f: &impl Fn(f64) -> [f64; K], a: f64, b: f64) -> [f64; K] {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; K];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let y = f(mid + half * x);
            for k in 0..K {
                acc[k] += w * y[k];
            }
        }
        acc.map(|v| v * half)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub panels: usize,
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    left: [f64; K],
    right: [f64; K],
    err: f64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.a.total_cmp(&self.a))
    }
}

fn make_panel<const K: usize>(
    rule: &GaussLegendre,
    f: &impl Fn(f64) -> [f64; K],
    a: f64,
    b: f64,
    whole: [f64; K],
) -> Panel<K> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let err = (0..K)
        .map(|k| (whole[k] - left[k] - right[k]).abs())
        .fold(0.0, f64::max);
    Panel {
        a,
        b,
        left,
        right,
        err,
    }
}

/// Integrates `f` over `[breakpoints[0], breakpoints.last()]`, starting with
/// one panel per consecutive pair of (sorted, deduplicated) breakpoints.
pub fn integrate<const K: usize>(
    f: impl Fn(f64) -> [f64; K],
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral<K>> {
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(Integral {
            value: [0.0; K],
            error: 0.0,
            panels: 0,
        });
    }
    let rule = GaussLegendre::new(DEFAULT_ORDER);
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        let whole = rule.integrate(&f, w[0], w[1]);
        heap.push(make_panel(&rule, &f, w[0], w[1], whole));
    }
    // Running totals; refreshed exactly every so often to stop drift.
    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    let mut value = [0.0; K];
    for p in heap.iter() {
        for k in 0..K {
            value[k] += p.left[k] + p.right[k];
        }
    }
    let mut steps = 0usize;
    loop {
        let scale = value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = spec.abs_tol.max(spec.rel_tol * scale);
        if total_err <= tol || steps % 512 == 511 {
            total_err = heap.iter().map(|p| p.err).sum();
            if total_err <= tol {
                return Ok(finish(heap.into_vec(), total_err));
            }
        }
        steps += 1;
        if heap.len() >= spec.max_panels {
            return Err(Error::QuadratureNotConverged {
                achieved: total_err,
                requested: tol,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Cannot bisect further in floating point; accept as is.
            return Err(Error::QuadratureNotConverged {
                achieved: total_err,
                requested: tol,
                panels: heap.len() + 1,
            });
        }
        let l = make_panel(&rule, &f, worst.a, m, worst.left);
        let r = make_panel(&rule, &f, m, worst.b, worst.right);
        total_err += l.err + r.err - worst.err;
        for k in 0..K {
            value[k] += l.left[k] + l.right[k] + r.left[k] + r.right[k] - worst.left[k] - worst.right[k];
        }
        heap.push(l);
        heap.push(r);
    }
}

fn finish<const K: usize>(mut panels: Vec<Panel<K>>, error: f64) -> Integral<K> {
    // Fixed summation order, independent of refinement history.
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = [0.0; K];
    for p in &panels {
        for k in 0..K {
            value[k] += p.left[k] + p.right[k];
        }
    }
    Integral {
        value,
        error,
        panels: panels.len(),
    }
}
