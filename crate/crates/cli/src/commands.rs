use rayon::prelude::*;

use abmol::analytics::{steady_current, steady_rho21_closed, transmission};
use abmol::state::{assemble_rho, bloch_vector, coherence_phase, fidelity_to_target, ReducedDensityMatrix};
use abmol::{DecayConvention, DeviceParams, Propagator};

use crate::config::RunConfig;
use crate::table::{Cell, ResultTable};
use crate::CliError;

pub fn propagator(config: &RunConfig, device: &DeviceParams) -> Propagator {
    let convention = if config.full_linewidth {
        DecayConvention::FullLinewidth
    } else {
        DecayConvention::HalfLinewidth
    };
    Propagator::with_convention(device, convention)
}

fn numerical(context: String) -> impl FnOnce(abmol::Error) -> CliError {
    move |e| CliError::Numerical(format!("{context}: {e}"))
}

fn phase_or_nan(rho: &ReducedDensityMatrix) -> f64 {
    coherence_phase(rho).unwrap_or(f64::NAN)
}

pub fn time_trace(config: &RunConfig) -> Result<ResultTable, CliError> {
    let p = propagator(config, &config.device);
    let rows: Vec<Vec<Cell>> = config
        .time
        .points()
        .par_iter()
        .map(|&t| {
            let v = p.occupation_v(&config.bath, t, &config.quad).map_err(numerical(format!("t = {t}")))?;
            let rho = assemble_rho(&v).map_err(numerical(format!("t = {t}")))?;
            let b = bloch_vector(&rho);
            Ok(vec![
                t,
                rho.rho00,
                rho.rho11,
                rho.rho22,
                rho.rho33,
                rho.rho21.re,
                rho.rho21.im,
                b.r[0],
                b.r[1],
                b.r[2],
                b.leakage,
                phase_or_nan(&rho),
                fidelity_to_target(&rho, config.device.phi),
            ]
            .into_iter()
            .map(Cell::Num)
            .collect())
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = ResultTable::new(
        "time-trace",
        &[
            ("t", "1/Gamma"),
            ("rho00", "1"),
            ("rho11", "1"),
            ("rho22", "1"),
            ("rho33", "1"),
            ("re_rho21", "1"),
            ("im_rho21", "1"),
            ("rx", "1"),
            ("ry", "1"),
            ("rz", "1"),
            ("leakage", "1"),
            ("phase", "rad"),
            ("fidelity", "1"),
        ],
    );
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn flux_sweep(config: &RunConfig) -> Result<ResultTable, CliError> {
    let rows: Vec<Vec<Cell>> = config
        .flux
        .points()
        .par_iter()
        .map(|&phi| {
            let device = config.device.with_phi(phi);
            let v = propagator(config, &device)
                .steady_v(&config.bath, &config.quad)
                .map_err(numerical(format!("phi = {phi}")))?;
            let rho = assemble_rho(&v).map_err(numerical(format!("phi = {phi}")))?;
            // Zero-temperature companion; only defined for centred levels.
            let closed = steady_rho21_closed(&device, config.bath.bias()).ok();
            Ok(vec![
                phi,
                rho.rho21.re,
                rho.rho21.im,
                rho.rho21.norm(),
                phase_or_nan(&rho),
                fidelity_to_target(&rho, phi),
                closed.map_or(f64::NAN, |c| c.re),
                closed.map_or(f64::NAN, |c| c.im),
            ]
            .into_iter()
            .map(Cell::Num)
            .collect())
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = ResultTable::new(
        "flux-sweep",
        &[
            ("phi", "rad"),
            ("re_rho21", "1"),
            ("im_rho21", "1"),
            ("abs_rho21", "1"),
            ("phase", "rad"),
            ("fidelity_to_psi_phi", "1"),
            ("closed_form_re", "1"),
            ("closed_form_im", "1"),
        ],
    );
    table.summary.push((
        "closed_form".into(),
        "zero-temperature steady coherence at the same bias; NaN unless E1 + E2 = 0".into(),
    ));
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn transmission_scan(config: &RunConfig) -> Result<ResultTable, CliError> {
    let omegas = config.omega.points();
    let rows: Vec<Vec<Vec<Cell>>> = config
        .flux
        .points()
        .par_iter()
        .map(|&phi| {
            let device = config.device.with_phi(phi);
            omegas
                .iter()
                .map(|&w| {
                    let t = transmission(&device, w).map_err(|e| CliError::Numerical(e.to_string()))?;
                    Ok(vec![Cell::Num(w), Cell::Num(phi), Cell::Num(t)])
                })
                .collect()
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = ResultTable::new("transmission", &[("omega", "Gamma"), ("phi", "rad"), ("transmission", "1")]);
    rows.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

pub fn current(config: &RunConfig) -> Result<ResultTable, CliError> {
    let pairs: Vec<(f64, f64, f64)> = config
        .flux
        .points()
        .par_iter()
        .map(|&phi| {
            let at = |phi: f64| {
                steady_current(&config.device.with_phi(phi), &config.bath, &config.quad)
                    .map_err(numerical(format!("phi = {phi}")))
            };
            Ok((phi, at(phi)?, at(phi + 2.0 * std::f64::consts::PI)?))
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = ResultTable::new("current", &[("phi", "rad"), ("current", "e Gamma / hbar")]);
    let residual = pairs.iter().map(|(_, a, b)| (a - b).abs()).fold(0.0, f64::max);
    table.summary.push(("period_residual".into(), format!("{residual:e}")));
    for (phi, i, _) in pairs {
        table.push(vec![Cell::Num(phi), Cell::Num(i)]);
    }
    Ok(table)
}
