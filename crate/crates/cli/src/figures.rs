//! Named data grids: the exact sweeps behind the published plots, emitted
//! with their standard parameters. Overridable knobs (box length, bath
//! temperature, register gap) come from the effective settings; the grid
//! shapes themselves are fixed per figure.

use qszilard::spectrum::{box_thermo, classical_probability, joint_split_log_z};
use qszilard::{run_cycle, CycleConfig, CycleError, DemonSpec, PointParams, ThermoPoint, WellSpec};

use crate::output::{fmt_flag, fmt_float, Table};

pub const NAMES: [&str; 5] = ["fig2", "fig3a", "fig3b", "fig4", "fig5"];

pub fn default_filename(name: &str) -> String {
    format!("{name}.csv")
}

pub fn build(name: &str, params: &PointParams) -> Result<Table, CycleError> {
    match name {
        "fig2" => occupation_vs_temperature(params),
        "fig3a" => insertion_work_vs_position(params),
        "fig3b" => insertion_work_vs_length(params),
        "fig4" => net_work_grid(params),
        "fig5" => efficiency_grid(params),
        _ => unreachable!("caller validates the figure name"),
    }
}

fn insertion_work(well: &WellSpec, pt: &ThermoPoint, l: f64, tol: f64) -> Result<f64, CycleError> {
    let whole = box_thermo(well, pt, tol)?;
    let split = joint_split_log_z(well, pt, l, tol)?;
    Ok(pt.temperature() * (whole.log_z - split.log_joint_z))
}

/// Left-side occupation against temperature at one-third and one-quarter
/// insertion, next to the width-proportional classical value.
fn occupation_vs_temperature(params: &PointParams) -> Result<Table, CycleError> {
    let length = params.box_length;
    let well = WellSpec::natural(length)?;
    let mut table = Table::new("figure fig2", vec!["l", "T", "beta", "P_L", "P_L_classical"]);
    table.note_float("L", length);
    table.note("grid", "T linear 0.1..10 x100; l in {L/3, L/4}".into());
    for frac in [1.0 / 3.0, 0.25] {
        let l = frac * length;
        let classical = classical_probability(l, length)?;
        for i in 0..100 {
            let t = 0.1 + 9.9 * (i as f64) / 99.0;
            let pt = ThermoPoint::new(1.0 / t)?;
            let split = joint_split_log_z(&well, &pt, l, params.tol)?;
            table.push_row(vec![
                fmt_float(l),
                fmt_float(t),
                fmt_float(pt.beta()),
                fmt_float(split.p_left),
                fmt_float(classical),
            ]);
        }
    }
    Ok(table)
}

/// Insertion work across the well at three bath temperatures; the endpoint
/// rows are exact zeros.
fn insertion_work_vs_position(params: &PointParams) -> Result<Table, CycleError> {
    let length = params.box_length;
    let well = WellSpec::natural(length)?;
    let mut table = Table::new("figure fig3a", vec!["beta", "l", "W_ins"]);
    table.note_float("L", length);
    table.note("grid", "beta in {1, 0.5, 0.1}; l linear 0..L x201".into());
    for beta in [1.0, 0.5, 0.1] {
        let pt = ThermoPoint::new(beta)?;
        for i in 0..=200 {
            let l = length * (i as f64) / 200.0;
            let w = insertion_work(&well, &pt, l, params.tol)?;
            table.push_row(vec![fmt_float(beta), fmt_float(l), fmt_float(w)]);
        }
    }
    Ok(table)
}

/// Insertion work against box length at fixed fractional positions; the
/// classical limit empties it toward zero.
fn insertion_work_vs_length(params: &PointParams) -> Result<Table, CycleError> {
    let pt = ThermoPoint::new(params.system_beta)?;
    let mut table = Table::new("figure fig3b", vec!["l_frac", "L", "l", "W_ins"]);
    table.note_float("beta", params.system_beta);
    table.note("grid", "l/L in {0.1, 0.3, 0.5}; L 1..50 step 0.25".into());
    for frac in [0.1, 0.3, 0.5] {
        for k in 0..=196 {
            let length = 1.0 + 0.25 * (k as f64);
            let well = WellSpec::natural(length)?;
            let l = frac * length;
            let w = insertion_work(&well, &pt, l, params.tol)?;
            table.push_row(vec![
                fmt_float(frac),
                fmt_float(length),
                fmt_float(l),
                fmt_float(w),
            ]);
        }
    }
    Ok(table)
}

/// The `(beta_D, l)` plane shared by the net-work and efficiency grids:
/// forty-one demon temperatures plus the perfect-record limit, walls pinned
/// at the insertion point so the totals carry no endpoint noise.
fn demon_plane(
    params: &PointParams,
    mut emit: impl FnMut(f64, f64, &qszilard::CycleResult),
) -> Result<(), CycleError> {
    let length = params.box_length;
    let well = WellSpec::natural(length)?;
    let bath_betas: Vec<f64> = (0..41)
        .map(|i| 1.0 + 0.1 * (i as f64))
        .chain([f64::INFINITY])
        .collect();
    for bath_beta in bath_betas {
        let demon = DemonSpec::new(params.gap, bath_beta, params.coherence)?;
        for i in 0..=100 {
            let l = length * (i as f64) / 100.0;
            let cfg = CycleConfig::new(well, params.system_beta, demon, l)?
                .with_expansion(l, l)?
                .with_tol(params.tol)?;
            let result = run_cycle(&cfg)?;
            emit(bath_beta, l, &result);
        }
    }
    Ok(())
}

fn grid_notes(table: &mut Table, params: &PointParams) {
    table.note_float("L", params.box_length);
    table.note_float("beta", params.system_beta);
    table.note_float("Delta", params.gap);
    table.note_float("F", params.coherence);
    table.note(
        "grid",
        "beta_D linear 1..5 x41 then inf; l linear 0..L x101".into(),
    );
}

fn net_work_grid(params: &PointParams) -> Result<Table, CycleError> {
    let mut table = Table::new("figure fig4", vec!["l", "beta_D", "W_tot", "pwc"]);
    grid_notes(&mut table, params);
    demon_plane(params, |bath_beta, l, result| {
        table.push_row(vec![
            fmt_float(l),
            fmt_float(bath_beta),
            fmt_float(result.w_tot),
            fmt_flag(result.pwc_satisfied),
        ]);
    })?;
    Ok(table)
}

fn efficiency_grid(params: &PointParams) -> Result<Table, CycleError> {
    let mut table = Table::new("figure fig5", vec!["l", "beta_D", "eta", "eta_carnot"]);
    grid_notes(&mut table, params);
    demon_plane(params, |bath_beta, l, result| {
        table.push_row(vec![
            fmt_float(l),
            fmt_float(bath_beta),
            fmt_float(result.eta),
            fmt_float(result.eta_carnot),
        ]);
    })?;
    Ok(table)
}
