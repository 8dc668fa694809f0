//! One function per subcommand, each producing a [`Report`].

use std::path::PathBuf;

use casimir_core::dielectric::{eps_imag_axis, zero_frequency_character, DrudeParams, OpticalTable, PermittivityModel};
use casimir_core::edge::{overhang_terms, total_pfa_error, EdgeParams};
use casimir_core::lifshitz::{
    cylinder_quantity, high_temperature_force, high_temperature_gradient, thermal_correction_at, ForceResult,
    Geometry, Quantity, ThermalState,
};
use casimir_core::tilt::{kappa, kappa_nm, tilted_force, tilted_gradient, TiltParams};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{config_error, CliResult};
use crate::output::{Cell, Column, PlotSpec, Report};

pub const TABLE1_SEPARATIONS_NM: [f64; 6] = [100.0, 150.0, 200.0, 300.0, 400.0, 500.0];
pub const TABLE1_A_THETA: [f64; 4] = [0.01, 0.05, 0.1, 0.5];
pub const EDGE_SEPARATIONS_NM: [f64; 2] = [100.0, 500.0];

/// Evaluates `f` at every point on the rayon pool; rows come back in input
/// order and the first failing point (in that order) decides the error.
fn sweep<T, F>(points: &[f64], f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> CliResult<T> + Sync,
{
    let results: Vec<CliResult<T>> = points.par_iter().map(|&a| f(a)).collect();
    results.into_iter().collect()
}

fn warnings_cell(r: &ForceResult) -> Cell {
    Cell::Text(r.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("; "))
}

fn a_plot(cfg: &RunConfig, series: Vec<usize>, y_label: &str) -> PlotSpec {
    PlotSpec { x: 0, x_scale: 1e6, x_label: "a (um)".into(), series, y_label: y_label.into(), log_x: cfg.log_sweep() }
}

/// The force or gradient at one separation, tilted if the config asks for it.
pub fn evaluate_point(cfg: &RunConfig, which: Quantity, a: f64) -> CliResult<(ForceResult, Option<f64>)> {
    let geom = cfg.geometry(a)?;
    match cfg.tilt {
        None => Ok((cylinder_quantity(&geom, cfg.thermal, &cfg.model, which, &cfg.quad)?, None)),
        Some(t) => {
            let tilt = t.params(&geom)?;
            let r = match which {
                Quantity::Force => tilted_force(&geom, cfg.thermal, &cfg.model, tilt, &cfg.quad)?,
                Quantity::Gradient => tilted_gradient(&geom, cfg.thermal, &cfg.model, tilt, &cfg.quad)?,
            };
            Ok((r, Some(tilt.a_theta(&geom))))
        }
    }
}

pub fn force_like(cfg: &RunConfig, which: Quantity) -> CliResult<Report> {
    let (name, unit, unit_per_length) = match which {
        Quantity::Force => ("force", "N", "N/m"),
        Quantity::Gradient => ("gradient", "N/m", "N/m^2"),
    };
    let points = cfg.points()?;
    let mut columns = vec![Column::new("a", "m")];
    if cfg.tilt.is_some() {
        columns.push(Column::new("a_theta", ""));
    }
    columns.extend([
        Column::new(name, unit),
        Column::new("per_length", unit_per_length),
        Column::new("l_used", ""),
        Column::new("truncation_estimate", ""),
        Column::new("warnings", ""),
    ]);
    let value_col = if cfg.tilt.is_some() { 2 } else { 1 };
    let mut report = Report::new(name, cfg.echo.clone(), columns);
    let results = sweep(points, |a| evaluate_point(cfg, which, a))?;
    for (&a, (r, a_theta)) in points.iter().zip(results) {
        let mut row = vec![Cell::Num(a)];
        if let Some(x) = a_theta {
            row.push(Cell::Num(x));
        }
        row.extend([
            Cell::Num(r.value),
            Cell::Num(r.per_length),
            Cell::Int(r.l_used as u64),
            Cell::Num(r.truncation_estimate),
            warnings_cell(&r),
        ]);
        report.rows.push(row);
    }
    report.plot = Some(a_plot(cfg, vec![value_col], &format!("{name} ({unit})")));
    Ok(report)
}

pub fn thermal_correction(cfg: &RunConfig) -> CliResult<Report> {
    let points = cfg.points()?;
    let mut report = Report::new(
        "thermal-correction",
        cfg.echo.clone(),
        vec![Column::new("a", "m"), Column::new("delta_force", "%"), Column::new("delta_gradient", "%")],
    );
    let rows = sweep(points, |a| {
        let geom = cfg.geometry(a)?;
        let d1 = thermal_correction_at(&geom, cfg.thermal, &cfg.model, Quantity::Force, &cfg.quad)?;
        let d2 = thermal_correction_at(&geom, cfg.thermal, &cfg.model, Quantity::Gradient, &cfg.quad)?;
        Ok(vec![Cell::Num(a), Cell::Num(100.0 * d1), Cell::Num(100.0 * d2)])
    })?;
    report.rows = rows;
    report.plot = Some(a_plot(cfg, vec![1, 2], "thermal correction (%)"));
    Ok(report)
}

pub fn table1(cfg: &RunConfig) -> CliResult<Report> {
    let default: Vec<f64> = TABLE1_SEPARATIONS_NM.iter().map(|a| a / 1e9).collect();
    let points = match &cfg.separations {
        Some(s) => s.points.clone(),
        None => default,
    };
    let mut a_thetas = TABLE1_A_THETA.to_vec();
    if let Some(crate::config::Tilt::ATheta(x)) = cfg.tilt {
        if !a_thetas.contains(&x) {
            a_thetas.insert(0, x);
        }
    } else if cfg.tilt.is_some() {
        return config_error("table1 takes --a-theta (an extra column), not --theta");
    }
    let mut columns = vec![Column::new("a", "m")];
    columns.extend(a_thetas.iter().map(|x| Column::new(format!("kappa_nm(A={x})"), "")));
    let mut report = Report::new("table1", cfg.echo.clone(), columns);
    let rows = sweep(&points, |a| {
        let geom = cfg.geometry(a)?;
        let mut row = vec![Cell::Num(a)];
        for &x in &a_thetas {
            let tilt = TiltParams::from_a_theta(x, &geom)?;
            row.push(Cell::Num(kappa_nm(&geom, cfg.thermal, &cfg.model, tilt, &cfg.quad)?));
        }
        Ok(row)
    })?;
    report.rows = rows;
    let mut closed = vec![Cell::Text("kappa".into())];
    for &x in &a_thetas {
        closed.push(Cell::Num(kappa(x)?));
    }
    report.rows.push(closed);
    report.plot = Some(PlotSpec {
        x: 0,
        x_scale: 1e9,
        x_label: "a (nm)".into(),
        series: (1..=a_thetas.len()).collect(),
        y_label: "kappa_nm".into(),
        log_x: false,
    });
    Ok(report)
}

pub fn edge_error(cfg: &RunConfig) -> CliResult<Report> {
    let default: Vec<f64> = EDGE_SEPARATIONS_NM.iter().map(|a| a / 1e9).collect();
    let points = match &cfg.separations {
        Some(s) => s.points.clone(),
        None => default,
    };
    let mut columns = vec![Column::new("a", "m"), Column::new("pfa_error_force", "%"), Column::new("pfa_error_gradient", "%")];
    for (_, l1_um) in &cfg.l1 {
        columns.push(Column::new(format!("overhang_extra(L1={l1_um}um)"), "%"));
    }
    columns.push(Column::new("warnings", ""));
    let mut report = Report::new("edge-error", cfg.echo.clone(), columns);
    for &a in &points {
        let geom = cfg.geometry(a)?;
        let mut row = vec![
            Cell::Num(a),
            Cell::Num(100.0 * total_pfa_error(&geom, Quantity::Force)),
            Cell::Num(100.0 * total_pfa_error(&geom, Quantity::Gradient)),
        ];
        let mut notes: Vec<String> = geom.pfa_warning().into_iter().map(|w| w.to_string()).collect();
        for &(l1, l1_um) in &cfg.l1 {
            let edge = EdgeParams::new(l1)?;
            let terms = overhang_terms(&geom, &edge)?;
            let extra = terms.plate_edge.abs().max(terms.cylinder_height.abs()).max(terms.extra().abs());
            row.push(Cell::Num(100.0 * extra));
            let min = casimir_core::edge::OVERHANG_MIN_RATIO * a;
            if l1 < min || edge.h(geom.radius) < min {
                notes.push(format!("L1 = {l1_um} um: overhang expansion needs L1, H >> a"));
            }
        }
        row.push(Cell::Text(notes.join("; ")));
        report.rows.push(row);
    }
    report.plot = Some(PlotSpec {
        x: 0,
        x_scale: 1e9,
        x_label: "a (nm)".into(),
        series: vec![1, 2],
        y_label: "PFA error (%)".into(),
        log_x: false,
    });
    Ok(report)
}

pub const KK_PROBE_EV: [f64; 9] = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0];

pub fn kk_ingest(cfg: &RunConfig, path: Option<PathBuf>, tail: DrudeParams) -> CliResult<Report> {
    let Some(path) = path else {
        return config_error("kk-ingest needs a table path (positional or --optical-data)");
    };
    let table = OpticalTable::load(&path)?;
    let mut meta = cfg.echo.clone();
    meta.push(("table".into(), path.display().to_string()));
    meta.push(("rows".into(), table.rows().len().to_string()));
    meta.push(("omega_min_eV".into(), table.omega_min().to_string()));
    meta.push(("omega_max_eV".into(), table.omega_max().to_string()));
    meta.push(("tail_omega_p_eV".into(), tail.omega_p.to_string()));
    meta.push(("tail_gamma_eV".into(), tail.gamma.to_string()));
    let model = PermittivityModel::tabulated(table, tail);
    let drude = PermittivityModel::Drude(tail);
    let mut report = Report::new(
        "kk-ingest",
        meta,
        vec![
            Column::new("xi", "eV"),
            Column::new("eps_tabulated", ""),
            Column::new("eps_drude_tail", ""),
            Column::new("relative_difference", ""),
        ],
    );
    for xi in KK_PROBE_EV {
        let t = eps_imag_axis(&model, xi)?;
        let d = eps_imag_axis(&drude, xi)?;
        report.rows.push(vec![Cell::Num(xi), Cell::Num(t), Cell::Num(d), Cell::Num((t - d) / d)]);
    }
    report.plot = Some(PlotSpec {
        x: 0,
        x_scale: 1.0,
        x_label: "xi (eV)".into(),
        series: vec![3],
        y_label: "relative difference".into(),
        log_x: true,
    });
    Ok(report)
}

pub fn asymptote(cfg: &RunConfig) -> CliResult<Report> {
    if cfg.thermal.is_zero() {
        return config_error("asymptote needs T > 0");
    }
    let points = cfg.points()?;
    let t = cfg.thermal.temperature;
    let mut report = Report::new(
        "asymptote",
        cfg.echo.clone(),
        vec![
            Column::new("a", "m"),
            Column::new("tau", ""),
            Column::new("force", "N"),
            Column::new("force_asymptote", "N"),
            Column::new("force_ratio", ""),
            Column::new("gradient", "N/m"),
            Column::new("gradient_asymptote", "N/m"),
            Column::new("gradient_ratio", ""),
        ],
    );
    let rows = sweep(points, |a| {
        let geom: Geometry = cfg.geometry(a)?;
        let behavior = zero_frequency_character(&cfg.model, a);
        let f = cylinder_quantity(&geom, cfg.thermal, &cfg.model, Quantity::Force, &cfg.quad)?.value;
        let g = cylinder_quantity(&geom, cfg.thermal, &cfg.model, Quantity::Gradient, &cfg.quad)?.value;
        let fa = high_temperature_force(&geom, t, behavior)?;
        let ga = high_temperature_gradient(&geom, t, behavior)?;
        Ok(vec![
            Cell::Num(a),
            Cell::Num(ThermalState::new(t)?.tau(a)),
            Cell::Num(f),
            Cell::Num(fa),
            Cell::Num(f / fa),
            Cell::Num(g),
            Cell::Num(ga),
            Cell::Num(g / ga),
        ])
    })?;
    report.rows = rows;
    report.plot = Some(a_plot(cfg, vec![4, 7], "numeric / asymptote"));
    Ok(report)
}
