use std::f64::consts::PI;

use abmol::analytics::{large_bias_rho21, steady_rho21_closed};
use abmol::state::{assemble_rho, bloch_vector, coherence_phase, fidelity_to_target, ReducedDensityMatrix};
use abmol::{BathParams, DeviceParams, Propagator, QuadratureSpec};
use approx::assert_abs_diff_eq;
use num_complex::Complex64 as C64;

fn tail() -> QuadratureSpec {
    QuadratureSpec::default().with_tail()
}

fn steady(d: &DeviceParams, b: &BathParams) -> ReducedDensityMatrix {
    assemble_rho(&Propagator::new(d).steady_v(b, &tail()).unwrap()).unwrap()
}

fn at(d: &DeviceParams, b: &BathParams, t: f64) -> ReducedDensityMatrix {
    assemble_rho(&Propagator::new(d).occupation_v(b, t, &tail()).unwrap()).unwrap()
}

#[test]
fn convention_lock() {
    // Diagonal M = I/2: v21 = -(i/pi) atan(eV / Gamma).
    let d = DeviceParams::degenerate(0.0, PI);
    for bias in [1.0, 2.0, 6.0] {
        let rho = steady(&d, &BathParams::symmetric(bias, 0.0));
        assert_abs_diff_eq!(rho.rho21.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.rho21.im, -(bias.atan()) / PI, epsilon = 1e-9);
    }
}

#[test]
fn equilibrium_has_no_coherence() {
    for phi in [0.3, PI / 2.0, PI, -2.5] {
        for dg in [0.0, 0.9] {
            let rho = steady(&DeviceParams::degenerate(dg, phi), &BathParams::symmetric(0.0, 0.0));
            assert!(rho.rho21.norm() < 1e-9, "phi={phi} dg={dg}: {}", rho.rho21);
            assert_abs_diff_eq!(rho.rho11, 0.25, epsilon = 1e-9);
        }
    }
}

#[test]
fn canonical_steady_state_at_half_flux_quantum() {
    let rho = steady(&DeviceParams::degenerate(0.9, PI), &BathParams::symmetric(6.0, 0.0));
    let want = ((3.0f64 / 0.95).atan() + 60f64.atan()) / (2.0 * PI);
    assert_abs_diff_eq!(rho.rho21.im, -want, epsilon = 1e-9);
    assert_abs_diff_eq!(rho.rho21.re, 0.0, epsilon = 1e-12);
    let b = bloch_vector(&rho);
    assert_abs_diff_eq!(b.r[1], -2.0 * want, epsilon = 1e-9);
    assert_abs_diff_eq!(b.leakage, rho.rho00 + rho.rho33, epsilon = 1e-15);
    assert_abs_diff_eq!(b.r[0], 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.r[2], 0.0, epsilon = 1e-12);
}

#[test]
fn transient_reaches_steady_state() {
    // dGamma = 0, phi = pi: both modes decay at Gamma/2.
    let d = DeviceParams::degenerate(0.0, PI);
    let b = BathParams::symmetric(6.0, 0.05);
    let q = QuadratureSpec::default();
    let p = Propagator::new(&d);
    let late = p.occupation_v(&b, 30.0, &q).unwrap().v;
    let inf = p.steady_v(&b, &q).unwrap().v;
    assert!((late - inf).max_abs() < 10.0 * q.abs_tol);
}

#[test]
fn filling_from_empty_is_monotone() {
    let d = DeviceParams::degenerate(0.0, 0.0);
    let b = BathParams::symmetric(4.0, 0.0);
    let p = Propagator::new(&d);
    let mut prev = 0.0;
    for k in 0..=40 {
        let v = p.occupation_v(&b, 0.25 * k as f64, &tail()).unwrap().v;
        let n = v.trace().re;
        assert!(n >= prev - 1e-9, "t={}: {n} < {prev}", 0.25 * k as f64);
        prev = n;
    }
}

#[test]
fn coherence_phase_follows_flux_at_large_bias() {
    let b = BathParams::symmetric(200.0, 0.0).with_cutoff(300.0);
    for phi in [0.4, 1.0, 2.0, 3.0, 5.0] {
        let rho = steady(&DeviceParams::degenerate(0.999, phi), &b);
        let phase = coherence_phase(&rho).unwrap();
        assert!((phase + 0.5 * phi).abs() < 0.05, "phi={phi}: {phase}");
    }
}

#[test]
fn molecular_state_locks_in() {
    let d = DeviceParams::degenerate(0.9, -0.5 * PI);
    let b = BathParams::symmetric(6.0, 0.05);
    let phases: Vec<f64> = (0..50)
        .map(|k| 1.0 + 2.0 * k as f64 / 49.0)
        .map(|t| coherence_phase(&at(&d, &b, t)).unwrap())
        .collect();
    let mean = phases.iter().sum::<f64>() / 50.0;
    let var = phases.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 50.0;
    assert!(var.sqrt() < 0.05);
    // Regression value from the first verified build.
    let f = fidelity_to_target(&at(&d, &b, 3.0), d.phi);
    assert_abs_diff_eq!(f, 0.870_542_364, epsilon = 1e-6);
}

#[test]
fn steady_states_are_physical_past_the_exceptional_point() {
    // dE large enough that gamma is imaginary.
    for (de, phi) in [(1.5, 1.0), (3.0, PI), (0.8, 2.8)] {
        let d = DeviceParams::new(0.5 * de, -0.5 * de, 0.7, 0.3, phi);
        let rho = steady(&d, &BathParams::symmetric(4.0, 0.0));
        assert!(rho.rho21.norm_sqr() <= rho.rho11 * rho.rho22 + 1e-10);
        let closed = steady_rho21_closed(&d, 4.0).unwrap();
        assert!((closed - rho.rho21).norm() < 1e-6, "{closed} vs {}", rho.rho21);
    }
}

#[test]
fn finite_temperature_sweep_stays_near_zero_temperature_closed_form() {
    let b = BathParams::symmetric(6.0, 0.05);
    for k in -16..=16 {
        let d = DeviceParams::degenerate(0.9, k as f64 * PI / 8.0);
        let rho = steady(&d, &b);
        let closed = steady_rho21_closed(&d, 6.0).unwrap();
        assert!((rho.rho21 - closed).norm() < 0.02, "k={k}");
    }
}

#[test]
fn anti_symmetric_state_near_two_pi() {
    let b = BathParams::symmetric(200.0, 0.0).with_cutoff(300.0);
    for phi in [2.0 * PI - 1e-3, -2.0 * PI + 1e-3] {
        let d = DeviceParams::degenerate(0.9, phi);
        let rho = steady(&d, &b);
        assert!((rho.rho21 - C64::new(-0.45, 0.0)).norm() < 1e-2);
        assert!((rho.rho21 - large_bias_rho21(&d).unwrap()).norm() < 1e-2);
    }
}

#[test]
fn decoupled_mode_at_two_pi_stays_empty() {
    // Exactly at phi = 2 pi the mode (|1> + |2>)/sqrt 2 couples to neither lead.
    let d = DeviceParams::degenerate(0.9, 2.0 * PI);
    let b = BathParams::symmetric(6.0, 0.0);
    let v = Propagator::new(&d).steady_v(&b, &tail()).unwrap().v;
    let dark = [C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)];
    let x = v.mul_vec(dark);
    let occupation = dark[0].conj() * x[0] + dark[1].conj() * x[1];
    assert!(occupation.norm() < 1e-9);
    assert!((steady_rho21_closed(&d, 6.0).unwrap() - v[(1, 0)]).norm() < 1e-9);
}
