//! Experiment dispatch: build states from the config, run the scan, emit
//! the table and the metadata echo.

use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;

use jc_catalysis::hilbert::{coherent_state_with_tail_tol, CavityState};
use jc_catalysis::jc_core::SimulationParams;
use jc_catalysis::lindblad::DissipationParams;
use jc_catalysis::protocols;
use jc_catalysis::witness::{wigner, wln_of_field, GridSpec};
use jc_catalysis::Error;

use crate::config::{Experiment, ExperimentSpec, GridOverride, RunConfig};
use crate::output::{write_csv, write_metadata, Cell};
use crate::CliError;

/// Setup-stage failures (bad physics parameters, truncation too small for
/// the requested state) are configuration errors; later failures are
/// compute errors.
fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

fn compute_err(e: Error) -> CliError {
    CliError::Compute(e)
}

fn resolve_grid(over: &GridOverride, alpha_abs: f64) -> Result<GridSpec<f64>, CliError> {
    let default = GridSpec::default_for(alpha_abs);
    GridSpec::new(
        over.half_width.unwrap_or(default.half_width),
        over.points.unwrap_or(default.points),
    )
    .map_err(config_err)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|k| lo + step * k as f64).collect()
}

/// Run one experiment; returns the files written.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&config.output_dir)?;
    let params =
        SimulationParams::new(config.omega, config.g, config.n_trunc).map_err(config_err)?;
    let cavity = if config.experiment == Experiment::ScanAlpha {
        None
    } else {
        Some(
            coherent_state_with_tail_tol(config.alpha, config.n_trunc, config.tail_tol)
                .map_err(config_err)?,
        )
    };
    let csv_path = config.output_dir.join(config.experiment.csv_name());
    let mut notes: Vec<(String, String)> = Vec::new();

    match &config.spec {
        ExperimentSpec::G2VsTime { windows, resolve_steps, target_g2, scan_points } => {
            let cavity = cavity.unwrap();
            let (tau, g2_at_tau) =
                protocols::resolve_tau_near(&cavity, &params, windows, *resolve_steps, *target_g2)
                    .map_err(compute_err)?;
            notes.push(("resolved_tau".into(), format!("{tau}")));
            notes.push(("g2_at_resolved_tau".into(), format!("{g2_at_tau}")));
            let grid = linspace(0.0, tau, *scan_points);
            let (_catalyst, points) =
                protocols::scan_g2_vs_time(&cavity, &params, &grid).map_err(compute_err)?;
            write_csv(
                &csv_path,
                "t,g2,delta,q,re_r,im_r",
                points.iter().map(|p| {
                    vec![
                        Cell::F(p.t),
                        Cell::F(p.g2),
                        Cell::F(p.delta),
                        Cell::F(p.atom.q()),
                        Cell::F(p.atom.r().re),
                        Cell::F(p.atom.r().im),
                    ]
                }),
            )?;
        }
        ExperimentSpec::Wigner { tau, grid } => {
            let cavity = cavity.unwrap();
            let grid = resolve_grid(grid, config.alpha.norm())?;
            let sigma = catalytic_final_state(&cavity, &params, *tau)?;
            let field = wigner(&sigma, &grid).map_err(compute_err)?;
            notes.push(("grid_half_width".into(), format!("{}", grid.half_width)));
            notes.push(("grid_points".into(), format!("{}", grid.points)));
            let nx = field.x_grid.len();
            let np = field.p_grid.len();
            write_csv(
                &csv_path,
                "x,p,w",
                (0..nx).flat_map(|i| (0..np).map(move |j| (i, j))).map(|(i, j)| {
                    vec![
                        Cell::F(field.x_grid[i]),
                        Cell::F(field.p_grid[j]),
                        Cell::F(field.values[(i, j)]),
                    ]
                }),
            )?;
        }
        ExperimentSpec::WlnVsTime { tau, scan_points, grid } => {
            let cavity = cavity.unwrap();
            let grid = resolve_grid(grid, config.alpha.norm())?;
            notes.push(("grid_half_width".into(), format!("{}", grid.half_width)));
            notes.push(("grid_points".into(), format!("{}", grid.points)));
            let catalyst = feasible_catalyst_at(&cavity, &params, *tau)?;
            let times = linspace(0.0, *tau, *scan_points);
            let mut rows = Vec::with_capacity(times.len());
            for &t in &times {
                let sigma =
                    jc_catalysis::jc_core::reduced_cavity_analytic(&cavity, &catalyst, &params, t)
                        .map_err(compute_err)?;
                let atom_t =
                    jc_catalysis::jc_core::atom_state_at(&cavity, &catalyst, &params, t)
                        .map_err(compute_err)?;
                let field = wigner(&sigma, &grid).map_err(compute_err)?;
                rows.push((t, wln_of_field(&field), atom_t.trace_distance_to(&catalyst)));
            }
            write_csv(
                &csv_path,
                "t,wln,delta",
                rows.iter().map(|(t, w, d)| vec![Cell::F(*t), Cell::F(*w), Cell::F(*d)]),
            )?;
        }
        ExperimentSpec::ScanAlpha { alpha_grid, gtau_bound, tau_steps } => {
            let points =
                protocols::scan_min_g2_vs_alpha(alpha_grid, &params, *gtau_bound, *tau_steps)
                    .map_err(compute_err)?;
            write_csv(
                &csv_path,
                "alpha,min_g2,argmin_tau",
                points.iter().map(|p| {
                    vec![Cell::F(p.alpha), Cell::F(p.min_g2), Cell::F(p.argmin_tau)]
                }),
            )?;
        }
        ExperimentSpec::CatalyticSet { n_samples, gtau_bound } => {
            let cavity = cavity.unwrap();
            notes.push((
                "sampling_law".into(),
                format!("tau ~ uniform(0, gtau_bound/g], {n_samples} samples, seed {}", config.seed),
            ));
            let records = protocols::catalytic_set_scan(
                &cavity,
                &params,
                *n_samples,
                *gtau_bound,
                config.seed,
            );
            write_csv(
                &csv_path,
                "tau,q,re_r,im_r,g2,feasible,delta",
                records.iter().map(|r| {
                    vec![
                        Cell::F(r.tau),
                        Cell::F(r.q),
                        Cell::F(r.r.re),
                        Cell::F(r.r.im),
                        Cell::F(r.g2),
                        Cell::B(r.feasible),
                        Cell::F(r.delta),
                    ]
                }),
            )?;
        }
        ExperimentSpec::Squeezing { windows, resolve_steps, scan_points } => {
            let cavity = cavity.unwrap();
            let window = windows[0];
            let (tau, xi_min) =
                protocols::resolve_tau_min_xi(&cavity, &params, window, *resolve_steps)
                    .map_err(compute_err)?;
            notes.push(("resolved_tau".into(), format!("{tau}")));
            notes.push(("xi_at_resolved_tau".into(), format!("{xi_min}")));
            let catalyst = feasible_catalyst_at(&cavity, &params, tau)?;
            let times = linspace(0.0, tau, *scan_points);
            let mut rows = Vec::with_capacity(times.len());
            for &t in &times {
                let sigma =
                    jc_catalysis::jc_core::reduced_cavity_analytic(&cavity, &catalyst, &params, t)
                        .map_err(compute_err)?;
                let atom_t =
                    jc_catalysis::jc_core::atom_state_at(&cavity, &catalyst, &params, t)
                        .map_err(compute_err)?;
                rows.push((
                    t,
                    jc_catalysis::witness::squeezing_xi(&sigma),
                    atom_t.trace_distance_to(&catalyst),
                ));
            }
            write_csv(
                &csv_path,
                "t,xi,delta",
                rows.iter().map(|(t, xi, d)| vec![Cell::F(*t), Cell::F(*xi), Cell::F(*d)]),
            )?;
        }
        ExperimentSpec::Dissipative { kappa, gamma, n_th, tau_start, tau_stop, tau_count, grid } => {
            let cavity = cavity.unwrap();
            let diss = DissipationParams::new(*kappa, *gamma, *n_th).map_err(config_err)?;
            let grid = resolve_grid(grid, config.alpha.norm())?;
            notes.push(("grid_half_width".into(), format!("{}", grid.half_width)));
            notes.push(("grid_points".into(), format!("{}", grid.points)));
            let taus = linspace(*tau_start, *tau_stop, *tau_count);
            let rows = protocols::dissipative_scan(&cavity, &params, &diss, &taus, &grid)
                .map_err(compute_err)?;
            write_csv(
                &csv_path,
                "tau,wln_open,g2_open,wln_closed,g2_closed,delta",
                rows.iter().map(|r| {
                    vec![
                        Cell::F(r.tau),
                        Cell::F(r.wln_open),
                        Cell::F(r.g2_open),
                        Cell::F(r.wln_closed),
                        Cell::F(r.g2_closed),
                        Cell::F(r.delta),
                    ]
                }),
            )?;
        }
        ExperimentSpec::Multicavity { tau, n_cavities, max_joint_dim } => {
            let cavity = cavity.unwrap();
            let mut rows = Vec::with_capacity(*n_cavities);
            for n in 1..=*n_cavities {
                let result =
                    protocols::multi_cavity_protocol(&cavity, &params, *tau, n, *max_joint_dim)
                        .map_err(compute_err)?;
                rows.push((n, result.fidelity));
            }
            write_csv(
                &csv_path,
                "n_cavities,fidelity",
                rows.iter().map(|(n, f)| vec![Cell::U(*n), Cell::F(*f)]),
            )?;
        }
    }

    let metadata = write_metadata(&config.output_dir, config, &notes)?;
    Ok(vec![csv_path, metadata])
}

fn feasible_catalyst_at(
    cavity: &CavityState<f64>,
    params: &SimulationParams<f64>,
    tau: f64,
) -> Result<jc_catalysis::hilbert::AtomState<f64>, CliError> {
    match jc_catalysis::catalyst::solve_catalyst(cavity, params, tau).map_err(compute_err)? {
        jc_catalysis::catalyst::CatalystSolution::Feasible(atom) => Ok(atom),
        jc_catalysis::catalyst::CatalystSolution::Infeasible { q, .. } => Err(CliError::Compute(
            Error::InvalidState(format!("no feasible catalyst at tau = {tau} (q = {q})")),
        )),
    }
}

fn catalytic_final_state(
    cavity: &CavityState<f64>,
    params: &SimulationParams<f64>,
    tau: f64,
) -> Result<CavityState<f64>, CliError> {
    let catalyst = feasible_catalyst_at(cavity, params, tau)?;
    jc_catalysis::jc_core::reduced_cavity_analytic(cavity, &catalyst, params, tau)
        .map_err(compute_err)
}

/// Parse alpha for completeness of the public API surface.
pub fn parse_alpha(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
