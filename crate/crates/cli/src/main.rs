//! `quadtrap` command-line front end.

mod assembly_doc;
mod commands;
mod error;
mod format;
mod record;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliResult;
use crate::format::{FieldUnit, Format, LengthUnit, Units};

/// Quadrupole trap design: fields, trap reports, planar optimisation,
/// scaling and device estimates.
#[derive(Debug, Parser)]
#[command(name = "quadtrap", version)]
pub struct Cli {
    /// Unit for field values; gradients follow as G/cm or T/m.
    #[arg(long, value_enum, default_value = "gauss", global = true)]
    pub field_unit: FieldUnit,
    /// Unit for positions and for bare length arguments.
    #[arg(long, value_enum, default_value = "mm", global = true)]
    pub length_unit: LengthUnit,
    /// Output format (default depends on the command).
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    AntiHelmholtz,
    Cylinder,
}

/// Where the conductor assembly comes from. Exactly one is required.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// JSON assembly file (lengths in metres).
    #[arg(long)]
    pub assembly: Option<PathBuf>,
    /// JSON assembly document given directly.
    #[arg(long)]
    pub inline: Option<String>,
    /// Built-in geometry.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

/// Preset parameters and drive calibration.
#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Anti-Helmholtz loop radius [default: 1m].
    #[arg(long)]
    pub radius: Option<String>,
    /// Anti-Helmholtz loop current in amperes.
    #[arg(long, default_value_t = 1.0)]
    pub loop_current: f64,
    /// Cylinder trap: centre-to-centre spacing of the straight conductors [default: 5mm].
    #[arg(long)]
    pub wire_separation: Option<String>,
    /// Cylinder trap: end-loop radius [default: 5.69mm].
    #[arg(long)]
    pub loop_radius: Option<String>,
    /// Cylinder trap: spacing between the end-loop planes [default: 5mm].
    #[arg(long)]
    pub plane_separation: Option<String>,
    /// Drive calibration in G/cm per ampere; the cylinder preset is scaled
    /// to match it and reports estimate gradients from it.
    #[arg(long, default_value_t = 10.0 / 15.0)]
    pub gradient_per_ampere: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the resolved assembly as a JSON document.
    Assembly {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        preset: PresetArgs,
    },
    /// Sample the field on a grid such as `x=-5:5:11,y=0,z=-5:5:11`.
    FieldMap {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        preset: PresetArgs,
        #[arg(long)]
        grid: String,
    },
    /// Locate the field zero and report the gradient tensor.
    Report {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        preset: PresetArgs,
        /// Drive current in amperes.
        #[arg(long, default_value_t = 1.0)]
        current: f64,
        /// Start of the zero search as `x,y,z` [default: assembly centroid].
        #[arg(long)]
        guess: Option<String>,
        /// Conductor resistance in ohms.
        #[arg(long, default_value_t = 640e-6)]
        resistance: f64,
    },
    /// Optimise two coplanar loops for gradient at height z0 (units of the
    /// reference radius).
    OptimizePlanar {
        #[arg(long, allow_negative_numbers = true)]
        z0: f64,
        /// Largest loop radius searched, in reference radii [default: 16 z0].
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 400)]
        r1_steps: usize,
        #[arg(long, default_value_t = 2000)]
        r2_steps: usize,
        /// Reference loop radius [default: 1m].
        #[arg(long)]
        radius: Option<String>,
        /// Reference current in amperes.
        #[arg(long, default_value_t = 1.0)]
        reference_current: f64,
    },
    /// Drive current, resistance and power of the scaled device at a fixed gradient.
    Scaling {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        preset: PresetArgs,
        /// Comma-separated linear scale factors.
        #[arg(long, default_value = "0.5,1,2,4")]
        scales: String,
        /// Target strong-axis gradient (G/cm, or T/m with tesla output).
        #[arg(long)]
        gradient: f64,
        #[arg(long)]
        guess: Option<String>,
        /// Conductor path length at scale 1, metres.
        #[arg(long, default_value_t = 0.2)]
        path_length: f64,
        /// Conductor cross-section at scale 1, square metres.
        #[arg(long, default_value_t = 1.5e-5)]
        cross_section: f64,
        /// Resistivity in ohm metres.
        #[arg(long, default_value_t = 5e-8)]
        resistivity: f64,
        /// Write the fitted exponents as JSON to this file (CSV output only).
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Expected atom number for a beam diameter and gradient.
    Atoms {
        /// Beam diameter, e.g. `15mm`.
        #[arg(long)]
        diameter: String,
        /// Gradient (G/cm, or T/m with tesla output).
        #[arg(long)]
        gradient: f64,
    },
    /// Fit temperature and initial size to a CSV with columns `t_s,sigma_m`.
    TofFit {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fit a Gaussian to a CSV profile with columns `x,value`.
    FitGaussian {
        #[arg(long)]
        input: PathBuf,
    },
    /// Dissipated power and calibrated gradient at a drive current.
    Power {
        #[arg(long)]
        current: f64,
        #[arg(long, default_value_t = 640e-6)]
        resistance: f64,
        #[arg(long, default_value_t = 10.0 / 15.0)]
        gradient_per_ampere: f64,
    },
    /// Cooling-laser detuning scheduled for a drive current.
    Detuning {
        #[arg(long)]
        current: f64,
    },
}

fn run(cli: &Cli) -> CliResult<Vec<u8>> {
    let units = Units {
        field: cli.field_unit,
        length: cli.length_unit,
    };
    let text = commands::dispatch(&cli.command, units, cli.format)?;
    Ok(text.into_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|bytes| {
        match &cli.out {
            Some(path) => std::fs::write(path, &bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
