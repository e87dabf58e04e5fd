//! Command implementations. Each returns the full output text, so nothing is
//! written when a command fails.

use std::path::Path;

use quadtrap::device::{
    atom_number_estimate, current_to_gradient, detuning_for_current, fit_gaussian_1d, power,
    tof_fit, AtomNumberModel, ConductorPath, DeviceCalibration, TofSample,
};
use quadtrap::planar::{feasible_curve, optimize_planar, PlanarSearch, Reference};
use quadtrap::trap::{calibrate_drive, field_map, trap_report, GridSpec};
use quadtrap::{
    anti_helmholtz, cylinder_trap, planar, units, ConductorAssembly, CylinderTrapParams, Vec3,
};

use crate::assembly_doc::{self, AssemblyDoc};
use crate::error::{CliError, CliResult};
use crate::format::{num, Format, Units};
use crate::record::{csv_err, finish_csv, Record, Value};
use crate::{Command, Preset, PresetArgs, Source};

pub fn dispatch(cmd: &Command, units: Units, format: Option<Format>) -> CliResult<String> {
    match cmd {
        Command::Assembly { source, preset } => {
            reject_csv(format, "assembly")?;
            let a = load_assembly(source, preset, units)?;
            let mut s = serde_json::to_string_pretty(&AssemblyDoc::from_assembly(&a))
                .expect("assembly documents serialize");
            s.push('\n');
            Ok(s)
        }
        Command::FieldMap {
            source,
            preset,
            grid,
        } => {
            let a = load_assembly(source, preset, units)?;
            field_map_cmd(&a, grid, units, format.unwrap_or(Format::Csv))
        }
        Command::Report {
            source,
            preset,
            current,
            guess,
            resistance,
        } => {
            reject_csv(format, "report")?;
            let a = load_assembly(source, preset, units)?;
            let guess = parse_guess(guess.as_deref(), &a, units)?;
            report_cmd(
                &a,
                *current,
                &guess,
                *resistance,
                preset.gradient_per_ampere,
                units,
            )
        }
        Command::OptimizePlanar {
            z0,
            r_max,
            r1_steps,
            r2_steps,
            radius,
            reference_current,
        } => {
            reject_csv(format, "optimize-planar")?;
            let mut search = PlanarSearch {
                r1_steps: *r1_steps,
                r2_steps: *r2_steps,
                ..PlanarSearch::default()
            };
            if let Some(r) = r_max {
                search.r_max_over_z0 = r / z0;
            }
            let reference = Reference {
                radius: opt_length(radius.as_deref(), 1.0, units)?,
                current: *reference_current,
            };
            optimize_cmd(*z0, &reference, &search, units)
        }
        Command::Scaling {
            source,
            preset,
            scales,
            gradient,
            guess,
            path_length,
            cross_section,
            resistivity,
            sidecar,
        } => {
            let a = load_assembly(source, preset, units)?;
            let guess = parse_guess(guess.as_deref(), &a, units)?;
            let scales = parse_list(scales, "scales")?;
            let path = ConductorPath {
                length: *path_length,
                cross_section: *cross_section,
                resistivity: *resistivity,
            };
            let target = units.gradient_in(*gradient);
            scaling_cmd(
                &a,
                &guess,
                &scales,
                target,
                &path,
                sidecar.as_deref(),
                format.unwrap_or(Format::Csv),
            )
        }
        Command::Atoms { diameter, gradient } => {
            let d = units.parse_length(diameter).map_err(CliError::Input)?;
            if d <= 0.0 {
                return Err(CliError::Input(format!(
                    "diameter must be positive, got {diameter}"
                )));
            }
            let g = units::gradient_to_gauss_per_cm(units.gradient_in(*gradient));
            let model = AtomNumberModel::default();
            let r = Record::new()
                .with("diameter_m", d)
                .with("gradient_G_per_cm", g)
                .with("plateau_factor", model.plateau_factor(g))
                .with("atom_number", atom_number_estimate(d, g, &model));
            emit(&r, format, "atoms")
        }
        Command::TofFit { input } => {
            let rows = read_pairs(input, ["t_s", "sigma_m"])?;
            let samples: Vec<TofSample> = rows
                .iter()
                .map(|&(t, sigma)| TofSample { t, sigma })
                .collect();
            let fit = tof_fit(&samples)?;
            let r = Record::new()
                .with("temperature_K", fit.temperature)
                .with("temperature_uK", fit.temperature * 1e6)
                .with("sigma0_m", fit.sigma0)
                .with("residual_m2", fit.residual)
                .with("degenerate", fit.degenerate)
                .with("samples", samples.len());
            emit(&r, format, "tof-fit")
        }
        Command::FitGaussian { input } => {
            let rows = read_pairs(input, ["x", "value"])?;
            let fit = fit_gaussian_1d(&rows)?;
            let r = Record::new()
                .with("amplitude", fit.amplitude)
                .with("center", fit.center)
                .with("sigma", fit.sigma)
                .with("offset", fit.offset)
                .with("residual", fit.residual)
                .with("iterations", fit.iterations);
            emit(&r, format, "fit-gaussian")
        }
        Command::Power {
            current,
            resistance,
            gradient_per_ampere,
        } => {
            let cal = calibration(*resistance, *gradient_per_ampere)?;
            check_finite(*current, "current")?;
            let r = Record::new()
                .with("current_A", *current)
                .with("resistance_ohm", *resistance)
                .with("power_W", power(*resistance, *current))
                .with("gradient_G_per_cm", current_to_gradient(*current, &cal));
            emit(&r, format, "power")
        }
        Command::Detuning { current } => {
            check_finite(*current, "current")?;
            let d = detuning_for_current(*current, &DeviceCalibration::default());
            let r = Record::new()
                .with("current_A", *current)
                .with("detuning_MHz", d.mhz)
                .with("clamped", d.clamped);
            emit(&r, format, "detuning")
        }
    }
}

fn reject_csv(format: Option<Format>, command: &str) -> CliResult<()> {
    if format == Some(Format::Csv) {
        return Err(CliError::Input(format!(
            "{command} output is nested; use --format json"
        )));
    }
    Ok(())
}

fn emit(r: &Record, format: Option<Format>, command: &str) -> CliResult<String> {
    match format.unwrap_or(Format::Json) {
        Format::Json => Ok(r.to_json()),
        Format::Csv => r.to_csv(command),
    }
}

fn check_finite(x: f64, name: &str) -> CliResult<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{name} must be finite")))
    }
}

fn calibration(resistance: f64, gradient_per_ampere: f64) -> CliResult<DeviceCalibration> {
    let cal = DeviceCalibration {
        resistance,
        gradient_per_ampere,
        ..DeviceCalibration::default()
    };
    cal.validate()?;
    Ok(cal)
}

fn opt_length(text: Option<&str>, default_m: f64, units: Units) -> CliResult<f64> {
    match text {
        None => Ok(default_m),
        Some(t) => units.parse_length(t).map_err(CliError::Input),
    }
}

fn parse_list(text: &str, name: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("invalid {name} entry '{s}'")))
        })
        .collect()
}

fn parse_guess(text: Option<&str>, a: &ConductorAssembly, units: Units) -> CliResult<Vec3> {
    let Some(text) = text else {
        return Ok(a.centroid());
    };
    let v = parse_list(text, "guess")?;
    if v.len() != 3 {
        return Err(CliError::Input(format!(
            "guess needs three coordinates, got '{text}'"
        )));
    }
    Ok(Vec3::new(v[0], v[1], v[2]) * units.metres_per_length())
}

fn load_assembly(
    source: &Source,
    preset: &PresetArgs,
    units: Units,
) -> CliResult<ConductorAssembly> {
    if let Some(path) = &source.assembly {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return assembly_doc::parse(&text, &path.display().to_string())?.to_assembly();
    }
    if let Some(text) = &source.inline {
        return assembly_doc::parse(text, "inline assembly")?.to_assembly();
    }
    match source.preset.expect("clap enforces one source") {
        Preset::AntiHelmholtz => {
            let r = opt_length(preset.radius.as_deref(), 1.0, units)?;
            Ok(anti_helmholtz(r, preset.loop_current)?)
        }
        Preset::Cylinder => {
            let d = CylinderTrapParams::default();
            let p = CylinderTrapParams {
                wire_separation: opt_length(
                    preset.wire_separation.as_deref(),
                    d.wire_separation,
                    units,
                )?,
                loop_radius: opt_length(preset.loop_radius.as_deref(), d.loop_radius, units)?,
                plane_separation: opt_length(
                    preset.plane_separation.as_deref(),
                    d.plane_separation,
                    units,
                )?,
                current: d.current,
            };
            let a = cylinder_trap(&p)?;
            let per_amp = units::gradient_from_gauss_per_cm(preset.gradient_per_ampere);
            Ok(calibrate_drive(&a, &a.centroid(), per_amp)?)
        }
    }
}

fn field_map_cmd(
    a: &ConductorAssembly,
    grid: &str,
    units: Units,
    format: Format,
) -> CliResult<String> {
    let display: GridSpec = grid.parse().map_err(|e| CliError::Input(format!("{e}")))?;
    let map = field_map(a, &display.scaled(units.metres_per_length()))?;
    let rows = map.samples.iter().enumerate().map(|(i, s)| {
        let p = display.point(i);
        let b = s.b.map(|c| units.field_out(c));
        [p.x, p.y, p.z, b.x, b.y, b.z, b.norm()]
    });
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "y", "z", "Bx", "By", "Bz", "Bmag"])
                .map_err(csv_err)?;
            for row in rows {
                w.write_record(row.iter().map(|v| num(*v)))
                    .map_err(csv_err)?;
            }
            finish_csv(w)
        }
        Format::Json => {
            let samples: Vec<Value> = rows.map(Value::from).collect();
            Ok(Record::new()
                .with("label", a.label())
                .with("units", unit_record(units))
                .with(
                    "columns",
                    Value::List(
                        ["x", "y", "z", "Bx", "By", "Bz", "Bmag"]
                            .iter()
                            .map(|c| Value::from(*c))
                            .collect(),
                    ),
                )
                .with("samples", samples)
                .to_json())
        }
    }
}

fn unit_record(units: Units) -> Record {
    let l = units.labels();
    Record::new()
        .with("length", l.length)
        .with("field", l.field)
        .with("gradient", l.gradient)
}

fn vec_value(v: &Vec3, f: impl Fn(f64) -> f64) -> Value {
    [f(v.x), f(v.y), f(v.z)].into()
}

fn report_cmd(
    a: &ConductorAssembly,
    current: f64,
    guess: &Vec3,
    resistance: f64,
    gradient_per_ampere: f64,
    units: Units,
) -> CliResult<String> {
    check_finite(current, "current")?;
    let cal = calibration(resistance, gradient_per_ampere)?;
    let rep = trap_report(&a.with_drive_current(current), guess)?;
    let g = |x: f64| units.gradient_out(x);
    let m = &rep.jacobian.m;
    let tensor: Vec<Value> = (0..3)
        .map(|i| [g(m[(i, 0)]), g(m[(i, 1)]), g(m[(i, 2)])].into())
        .collect();
    let r = Record::new()
        .with("label", a.label())
        .with("units", unit_record(units))
        .with("drive_current_A", current)
        .with("zero", vec_value(&rep.zero, |x| units.length_out(x)))
        .with("gradient_tensor", tensor)
        .with("eigenvalues", rep.eigenvalues.map(g))
        .with(
            "axes",
            rep.axes
                .iter()
                .map(|v| vec_value(v, |x| x))
                .collect::<Vec<_>>(),
        )
        .with("ratio", rep.ratio)
        .with("strong_gradient", g(rep.strong_gradient()))
        .with("resistance_ohm", resistance)
        .with("power_W", power(resistance, current))
        .with(
            "estimated_gradient_G_per_cm",
            current_to_gradient(current, &cal),
        );
    Ok(r.to_json())
}

fn optimize_cmd(
    z0: f64,
    reference: &Reference,
    search: &PlanarSearch,
    units: Units,
) -> CliResult<String> {
    let opt = optimize_planar(z0, reference, search)?;
    let curve = feasible_curve(z0, search)?;
    let unit = quadtrap::constants::MU0 * reference.current / (reference.radius * reference.radius);
    let g = |x: f64| units.gradient_out(x);
    let points: Vec<Value> = curve
        .iter()
        .map(|p| {
            Record::new()
                .with("r1", p.config.r1)
                .with("r2", p.config.r2)
                .with("i1", p.config.i1)
                .with("i2", p.config.i2)
                .with("gradient", g(p.gradient * unit.abs()))
                .into()
        })
        .collect();
    let c = &opt.config;
    let r = Record::new()
        .with("units", unit_record(units))
        .with("z0", z0)
        .with("reference_radius_m", reference.radius)
        .with("reference_current_A", reference.current)
        .with("r1", c.r1)
        .with("r2", c.r2)
        .with("i1", c.i1)
        .with("i2", c.i2)
        .with("gradient_2d", g(opt.gradient_2d))
        .with("gradient_3d", g(opt.gradient_3d))
        .with("gradient_ratio", opt.gradient_ratio)
        .with("power_ratio", opt.power_ratio)
        .with("feasible_curve", points);
    Ok(r.to_json())
}

fn scaling_cmd(
    a: &ConductorAssembly,
    guess: &Vec3,
    scales: &[f64],
    target: f64,
    path: &ConductorPath,
    sidecar: Option<&Path>,
    format: Format,
) -> CliResult<String> {
    let study = planar::scaling_study(a, guess, scales, target, path)?;
    let exponents = Record::new()
        .with("target_gradient_T_per_m", target)
        .with("current_exponent", study.current_exponent)
        .with("resistance_exponent", study.resistance_exponent)
        .with("power_exponent", study.power_exponent);
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["scale", "current_A", "resistance_ohm", "power_W"])
                .map_err(csv_err)?;
            for row in &study.rows {
                w.write_record([row.scale, row.current, row.resistance, row.power].map(num))
                    .map_err(csv_err)?;
            }
            let table = finish_csv(w)?;
            if let Some(p) = sidecar {
                std::fs::write(p, exponents.to_json())?;
            }
            Ok(table)
        }
        Format::Json => {
            if sidecar.is_some() {
                return Err(CliError::Input(
                    "--sidecar applies to CSV output only".into(),
                ));
            }
            let rows: Vec<Value> = study
                .rows
                .iter()
                .map(|r| {
                    Record::new()
                        .with("scale", r.scale)
                        .with("current_A", r.current)
                        .with("resistance_ohm", r.resistance)
                        .with("power_W", r.power)
                        .into()
                })
                .collect();
            Ok(exponents.with("rows", rows).to_json())
        }
    }
}

/// Two-column numeric CSV with an exact header; errors name the line.
fn read_pairs(path: &Path, header: [&str; 2]) -> CliResult<Vec<(f64, f64)>> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let found = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .clone();
    if found.len() != 2 || found.get(0) != Some(header[0]) || found.get(1) != Some(header[1]) {
        return Err(CliError::Input(format!(
            "{}: line 1: expected header '{},{}'",
            path.display(),
            header[0],
            header[1]
        )));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| -> CliResult<f64> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "{}: line {line}, column {}: expected a number",
                        path.display(),
                        i + 1
                    ))
                })
        };
        out.push((field(0)?, field(1)?));
    }
    Ok(out)
}
