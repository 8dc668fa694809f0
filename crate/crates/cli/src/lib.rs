//! Command-line front end for the cylinder-plate Casimir engine.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::io::Write;
use std::path::PathBuf;

use casimir_core::dielectric::DrudeParams;
use casimir_core::lifshitz::Quantity;
use clap::{Parser, Subcommand};

use config::{Options, RunConfig};
use error::CliResult;
use output::Report;

#[derive(Debug, Parser)]
#[command(name = "casimir-cyl", version, about = "Thermal Casimir force between a cylinder and a plate")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Force at each separation
    Force,
    /// Force gradient at each separation
    Gradient,
    /// Relative thermal correction of the force and the gradient, in percent
    ThermalCorrection,
    /// Tilt correction factors on the standard grid
    Table1,
    /// PFA error budget and plate-overhang corrections
    EdgeError,
    /// Validate an optical table and report eps(i xi) against its Drude tail
    KkIngest {
        path: Option<PathBuf>,
    },
    /// Numeric force and gradient against their high-temperature asymptotes
    Asymptote,
}

pub fn build_report(command: &Command, options: &Options) -> CliResult<Report> {
    if let Command::KkIngest { path } = command {
        // the tabulated model is not built here; the report does the loading
        let mut opts = options.clone();
        let path = path.clone().or_else(|| opts.optical_data.clone());
        opts.model.get_or_insert(config::ModelKind::Drude);
        if opts.model == Some(config::ModelKind::Tabulated) {
            opts.model = Some(config::ModelKind::Drude);
        }
        let cfg = RunConfig::resolve(&opts)?;
        let gold = DrudeParams::gold();
        let tail = DrudeParams::new(opts.omega_p.unwrap_or(gold.omega_p), opts.gamma.unwrap_or(gold.gamma))?;
        return commands::kk_ingest(&cfg, path, tail);
    }
    let cfg = RunConfig::resolve(options)?;
    match command {
        Command::Force => commands::force_like(&cfg, Quantity::Force),
        Command::Gradient => commands::force_like(&cfg, Quantity::Gradient),
        Command::ThermalCorrection => commands::thermal_correction(&cfg),
        Command::Table1 => commands::table1(&cfg),
        Command::EdgeError => commands::edge_error(&cfg),
        Command::Asymptote => commands::asymptote(&cfg),
        Command::KkIngest { .. } => unreachable!(),
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let options = cli.options.merged()?;
    let report = build_report(&cli.command, &options)?;
    let format = options.format.unwrap_or_default();
    match &options.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            report.write(format, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write(format, &mut lock)?;
            lock.flush()?;
        }
    }
    if let Some(path) = &options.plot {
        match plot::render(&report) {
            Some(svg) => std::fs::write(path, svg)?,
            None => eprintln!("warning: nothing to plot"),
        }
    }
    Ok(())
}
