//! The four subcommands, each producing a plot-ready table.

use rayon::prelude::*;
use trion_core::entangle::{
    bell_overlap, concurrence_double_slit, filtered_state, sliding_window_max, state_concurrence,
    BellTarget,
};
use trion_core::evolve::{integrate, min_survival, Trajectory};
use trion_core::floquet::{classify_crossings, sweep_quasienergies, QuasienergySweep};

use crate::config::{parse_state, AnalyticKind, RunConfig};
use crate::output::{Cell, Table};
use crate::CliError;

fn core_err(e: trion_core::Error) -> CliError {
    if e.is_domain() {
        CliError::Config(e.to_string())
    } else {
        CliError::Numerical(e.to_string())
    }
}

fn run_sweep(config: &RunConfig) -> Result<QuasienergySweep, CliError> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs a sweep block".into()))?;
    sweep_quasienergies(
        &config.model,
        sweep.phi_min,
        sweep.phi_max,
        sweep.n_points,
        &config.integrator,
    )
    .map_err(|e| {
        CliError::Numerical(format!(
            "{e} (sweep over phi in [{}, {}])",
            sweep.phi_min, sweep.phi_max
        ))
    })
}

/// Track-ordered quasienergies, parity labels and optional minimum survival
/// probabilities, one row per drive amplitude.
pub fn cmd_spectrum(config: &RunConfig) -> Result<Table, CliError> {
    let block = config
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("this command needs a sweep block".into()))?;
    let sweep = run_sweep(config)?;

    let pmin_columns: Vec<Vec<f64>> = block
        .pmin_alphas
        .iter()
        .map(|&alpha| {
            sweep
                .phis
                .par_iter()
                .map(|&phi| {
                    min_survival(
                        &config.model.with_phi(phi),
                        alpha,
                        block.pmin_periods,
                        &config.integrator,
                    )
                    .map_err(|e| CliError::Numerical(format!("{e} (at phi = {phi})")))
                })
                .collect::<Result<Vec<f64>, CliError>>()
        })
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["phi".to_string()];
    columns.extend((1..=8).map(|k| format!("eps_{k}")));
    columns.extend((1..=8).map(|k| format!("parity_{k}")));
    columns.extend(block.pmin_alphas.iter().map(|a| format!("pmin_{a}")));

    let mut table = Table::new(columns);
    for (j, &phi) in sweep.phis.iter().enumerate() {
        let mut row = Vec::with_capacity(table.columns.len());
        row.push(Cell::Float(phi));
        for track in &sweep.tracks {
            row.push(Cell::Float(track.quasienergies[j]));
        }
        for track in &sweep.tracks {
            row.push(Cell::Int(track.parities[j].as_i8() as i64));
        }
        for series in &pmin_columns {
            row.push(Cell::Float(series[j]));
        }
        table.push_row(row)?;
    }
    Ok(table)
}

/// Exact and avoided crossing events located in the sweep.
pub fn cmd_crossings(config: &RunConfig) -> Result<Table, CliError> {
    let block = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs a sweep block".into()))?;
    let sweep = run_sweep(config)?;
    let exact_tol = block.exact_tol.unwrap_or(1e-4 * config.model.omega);
    let events =
        classify_crossings(&sweep, exact_tol, &config.integrator).map_err(core_err)?;

    let mut table = Table::new(
        ["phi_star", "track_a", "track_b", "kind", "gap"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    for event in events {
        table.push_row(vec![
            Cell::Float(event.phi_star),
            Cell::Int(event.pair.0 as i64),
            Cell::Int(event.pair.1 as i64),
            Cell::Text(event.kind.label().to_string()),
            Cell::Float(event.gap),
        ])?;
    }
    Ok(table)
}

fn run_trajectory(
    config: &RunConfig,
    initial: &[[f64; 2]],
    n_periods: usize,
) -> Result<Trajectory, CliError> {
    let psi0 = parse_state(initial)?;
    let t1 = n_periods as f64 * config.model.period();
    integrate(&config.model, &psi0, 0.0, t1, &config.integrator).map_err(core_err)
}

/// Populations and raw amplitudes along a trajectory.
pub fn cmd_evolve(config: &RunConfig) -> Result<Table, CliError> {
    let block = config
        .evolve
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs an evolve block".into()))?;
    let trajectory = run_trajectory(config, &block.initial_state, block.n_periods)?;

    let mut columns = vec!["t".to_string()];
    columns.extend((1..=8).map(|k| format!("p{k}")));
    for k in 1..=8 {
        columns.push(format!("re_c{k}"));
        columns.push(format!("im_c{k}"));
    }
    let mut table = Table::new(columns);
    for (t, state) in trajectory.samples() {
        let mut row = Vec::with_capacity(table.columns.len());
        row.push(Cell::Float(t));
        for alpha in 1..=8 {
            row.push(Cell::Float(state.population(alpha)));
        }
        for alpha in 1..=8 {
            let c = state.amplitude(alpha);
            row.push(Cell::Float(c.re));
            row.push(Cell::Float(c.im));
        }
        table.push_row(row)?;
    }
    Ok(table)
}

/// Concurrence and Bell-overlap series along a trajectory. The filter, when
/// configured, applies to the full-concurrence column; overlaps always use
/// the raw evolving state, and the envelope columns are one-period sliding
/// maxima of the overlaps.
pub fn cmd_entangle(config: &RunConfig) -> Result<Table, CliError> {
    let block = config
        .entangle
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs an entangle block".into()))?;
    let trajectory = run_trajectory(config, &block.initial_state, block.n_periods)?;
    let targets: Vec<BellTarget> = block.targets.iter().map(|&l| BellTarget::new(l)).collect();

    let concurrence_full: Vec<f64> = trajectory
        .states()
        .par_iter()
        .map(|state| {
            let value = match &block.filter {
                Some(filter) => {
                    // A sample whose whole amplitude sits on the zeroed
                    // indices has nothing left in the filtered channel.
                    let surviving: f64 = (1..=8)
                        .filter(|alpha| !filter.zeroed.contains(alpha))
                        .map(|alpha| state.population(alpha))
                        .sum();
                    if surviving < 1e-12 {
                        return Ok(0.0);
                    }
                    state_concurrence(&filtered_state(state, filter).map_err(core_err)?)
                }
                None => state_concurrence(state),
            };
            value.map_err(core_err)
        })
        .collect::<Result<_, _>>()?;

    let analytic: Vec<f64> = trajectory
        .states()
        .iter()
        .map(|state| match block.analytic {
            AnalyticKind::PairProduct => {
                let (a, b) = targets[0].label.amplitude_pair();
                Ok(2.0 * state.amplitude(a).norm() * state.amplitude(b).norm())
            }
            AnalyticKind::DoubleSlit => {
                let quad = [
                    state.amplitude(1),
                    state.amplitude(2),
                    state.amplitude(7),
                    state.amplitude(8),
                ];
                let norm = quad.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    return Ok(0.0);
                }
                concurrence_double_slit(
                    quad[0] / norm,
                    quad[1] / norm,
                    quad[2] / norm,
                    quad[3] / norm,
                )
                .map_err(core_err)
            }
        })
        .collect::<Result<_, _>>()?;

    let overlaps: Vec<Vec<f64>> = targets
        .iter()
        .map(|target| {
            trajectory
                .states()
                .iter()
                .map(|state| bell_overlap(state, target))
                .collect()
        })
        .collect();
    let envelopes: Vec<Vec<f64>> = overlaps
        .iter()
        .map(|series| sliding_window_max(trajectory.times(), series, config.model.period()))
        .collect();

    let mut columns = vec![
        "t".to_string(),
        "concurrence_full".to_string(),
        "concurrence_analytic".to_string(),
    ];
    for target in &targets {
        columns.push(format!("overlap_{}", target.label.series_name()));
    }
    for target in &targets {
        columns.push(format!("envelope_{}", target.label.series_name()));
    }
    let mut table = Table::new(columns);
    for (j, (t, _)) in trajectory.samples().enumerate() {
        let mut row = Vec::with_capacity(table.columns.len());
        row.push(Cell::Float(t));
        row.push(Cell::Float(concurrence_full[j]));
        row.push(Cell::Float(analytic[j]));
        for series in &overlaps {
            row.push(Cell::Float(series[j]));
        }
        for series in &envelopes {
            row.push(Cell::Float(series[j]));
        }
        table.push_row(row)?;
    }
    Ok(table)
}
