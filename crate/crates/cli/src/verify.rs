//! Self-verification suite: the pipeline against the closed forms, against
//! the discretised-lead oracle, and against its symmetry invariants.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use abmol::analytics::{steady_current, steady_rho21_closed, transmission_unchecked};
use abmol::oracle::build_model;
use abmol::state::{assemble_rho, rho_from_v};
use abmol::{BathParams, DeviceParams, QuadratureSpec};

use crate::commands::propagator;
use crate::config::RunConfig;
use crate::table::{Cell, ResultTable};
use crate::CliError;

pub const ORACLE_TOL: f64 = 0.02;

struct Check {
    name: String,
    residual: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn fail(e: abmol::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Steady `rho21` against its closed form over a fixed parameter grid at zero temperature.
fn closed_form(config: &RunConfig, quad: &QuadratureSpec) -> Result<Check, CliError> {
    let mut grid = Vec::new();
    for k in -8..=8 {
        for dg in [0.0, 0.5, 0.9] {
            for de in [0.0, 0.5] {
                for bias in [2.0, 6.0] {
                    grid.push((k as f64 * PI / 4.0, dg, de, bias));
                }
            }
        }
    }
    let worst = grid
        .par_iter()
        .map(|&(phi, dg, de, bias)| {
            let d = DeviceParams::new(0.5 * de, -0.5 * de, 0.5 * (1.0 + dg), 0.5 * (1.0 - dg), phi);
            let b = BathParams::symmetric(bias, 0.0);
            let v = propagator(config, &d).steady_v(&b, quad).map_err(fail)?;
            let rho = assemble_rho(&v).map_err(fail)?;
            Ok((rho.rho21 - steady_rho21_closed(&d, bias).map_err(fail)?).norm())
        })
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Check::new(format!("closed-form ({} points)", grid.len()), worst, 1e-6))
}

fn oracle(config: &RunConfig, quad: &QuadratureSpec) -> Result<Check, CliError> {
    let n = config.oracle_modes;
    let band = config.oracle_bandwidth;
    let name = format!("oracle-equivalence (N={n}, D={band})");
    let model = build_model(&config.device, &config.bath.with_cutoff(band), n, band).map_err(fail)?;
    let times: Vec<f64> = [0.5, 1.0, 2.0, 3.0]
        .into_iter()
        .filter(|&t| t < 0.5 * model.recurrence_time())
        .collect();
    if times.is_empty() {
        // Leads too coarse to reach even the first comparison time.
        return Ok(Check::new(name, f64::INFINITY, ORACLE_TOL));
    }
    let p = propagator(config, &config.device);
    let worst = times
        .par_iter()
        .map(|&t| {
            let want = assemble_rho(&p.occupation_v(&config.bath, t, quad).map_err(fail)?).map_err(fail)?;
            let got = model.rho_at(t).map_err(fail)?;
            Ok(got.max_abs_diff(&want))
        })
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Check::new(name, worst, ORACLE_TOL))
}

fn periodicity(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let d = config.device;
    let quad = &config.quad;
    let rho = |phi: f64| -> Result<_, CliError> {
        let v = propagator(config, &d.with_phi(phi)).steady_v(&config.bath, quad).map_err(fail)?;
        assemble_rho(&v).map_err(fail)
    };
    let state = rho(d.phi)?.max_abs_diff(&rho(d.phi + 4.0 * PI)?);
    let current = |phi: f64| steady_current(&d.with_phi(phi), &config.bath, quad).map_err(fail);
    let current = (current(d.phi)? - current(d.phi + 2.0 * PI)?).abs();
    Ok(vec![
        Check::new("state-period-4pi", state, 1e-9),
        Check::new("current-period-2pi", current, 1e-10),
    ])
}

fn unitarity(config: &RunConfig) -> Check {
    let mut worst: f64 = 0.0;
    for phi in config.flux.points() {
        let d = config.device.with_phi(phi);
        for w in config.omega.points() {
            let t = transmission_unchecked(&d, w);
            worst = worst.max(-t).max(t - 1.0);
        }
    }
    Check::new("transmission-unitarity", worst.max(0.0), 1e-12)
}

/// Invariants over random parameter draws seeded from the config.
fn fuzz(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let draws: Vec<(DeviceParams, BathParams, Option<f64>)> = (0..config.fuzz_draws)
        .map(|_| {
            let d = DeviceParams::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.02..1.0),
                rng.gen_range(0.02..1.0),
                rng.gen_range(-4.0 * PI..4.0 * PI),
            );
            let b = BathParams::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.0..1.0), 50.0);
            let t = rng.gen_bool(0.8).then(|| rng.gen_range(0.0..10.0));
            (d, b, t)
        })
        .collect();
    let quad = &config.quad;
    let worst = draws
        .par_iter()
        .map(|(d, b, t)| {
            let p = propagator(config, d);
            let v = match t {
                Some(t) => p.occupation_v(b, *t, quad),
                None => p.steady_v(b, quad),
            }
            .map_err(fail)?;
            let [lo, hi] = v.eigenvalues();
            let rho = rho_from_v(&v.v);
            Ok([
                (rho.trace() - 1.0).abs(),
                v.v.hermitian_deviation(),
                (-lo).max(hi - 1.0).max(0.0),
                (rho.rho21.norm_sqr() - rho.rho11 * rho.rho22).max(0.0),
            ])
        })
        .collect::<Result<Vec<[f64; 4]>, CliError>>()?
        .into_iter()
        .fold([0.0f64; 4], |acc, x| std::array::from_fn(|i| acc[i].max(x[i])));
    let tag = format!("(seed={}, draws={})", config.seed, config.fuzz_draws);
    Ok(vec![
        Check::new(format!("fuzz-trace {tag}"), worst[0], 1e-9),
        Check::new(format!("fuzz-hermitian {tag}"), worst[1], 1e-12),
        Check::new(format!("fuzz-occupations {tag}"), worst[2], 1e-8),
        Check::new(format!("fuzz-positivity {tag}"), worst[3], 1e-10),
    ])
}

/// Runs every check; the second value counts failures.
pub fn verify(config: &RunConfig) -> Result<(ResultTable, usize), CliError> {
    // Closed forms and the oracle describe an infinite band.
    let quad = config.quad.with_tail();
    let mut checks = vec![closed_form(config, &quad)?, oracle(config, &quad)?];
    checks.extend(periodicity(config)?);
    checks.push(unitarity(config));
    checks.extend(fuzz(config)?);

    let mut table = ResultTable::new(
        "verify",
        &[("check", "-"), ("residual", "1"), ("tolerance", "1"), ("status", "-")],
    );
    table.summary.push((
        "verify_note".into(),
        "closed-form and oracle checks always use the analytic tail beyond the cutoff".into(),
    ));
    let mut failures = 0;
    for c in &checks {
        let status = if c.passed() { "pass" } else { "fail" };
        if !c.passed() {
            failures += 1;
        }
        table.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Num(c.residual),
            Cell::Num(c.tolerance),
            status.into(),
        ]);
    }
    Ok((table, failures))
}

/// One line per check for the terminal.
pub fn report(table: &ResultTable) -> String {
    table
        .rows
        .iter()
        .map(|r| match (&r[0], &r[1], &r[2], &r[3]) {
            (Cell::Text(name), Cell::Num(res), Cell::Num(tol), Cell::Text(status)) => {
                format!("{} {name}: residual {res:.3e} (tolerance {tol:.0e})\n", status.to_uppercase())
            }
            _ => String::new(),
        })
        .collect()
}
