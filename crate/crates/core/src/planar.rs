//! Planar versus two-plane quadrupole generation, and miniaturisation scaling.
//!
//! Two concentric loops in one plane (radii `r1 < r2`, currents `i1`, `i2`)
//! are compared against an anti-Helmholtz pair of radius `R` and current `I`.
//! Lengths are in units of `R` and currents in units of `I`. The planar pair
//! must produce a field zero at height `z0` with vanishing axial curvature,
//! and must dissipate the same power as the pair: `r1 i1² + r2 i2² = 2`.
//! Only the on-axis field is needed; there it is purely axial.
//!
//! On the axis a loop contributes `i · f(r, z)` (in units of `μ0 I / R`) with
//! `f = r² / (2 (r² + z²)^{3/2})`. Zero field fixes `i2/i1 = -f1/f2`; zero
//! curvature additionally needs `f1''/f1 = f2''/f2`, which defines the
//! feasible curve in the `(r1, r2)` plane.

use rayon::prelude::*;

use crate::constants::MU0;
use crate::device::ConductorPath;
use crate::error::{Result, TrapError};
use crate::geometry::{CircularLoop, ConductorAssembly, Vec3};
use crate::stats::loglog_slope;
use crate::trap::trap_report;

/// Planar two-loop configuration in reference units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarConfig {
    pub r1: f64,
    pub r2: f64,
    pub i1: f64,
    pub i2: f64,
    /// Height of the field zero above the loop plane.
    pub z0: f64,
}

impl PlanarConfig {
    /// Power relative to the anti-Helmholtz reference (1 means equal power).
    pub fn power_fraction(&self) -> f64 {
        (self.r1 * self.i1 * self.i1 + self.r2 * self.i2 * self.i2) / 2.0
    }

    /// The two loops in the `z = 0` plane, in SI units for the given reference.
    pub fn to_assembly(&self, reference: &Reference) -> Result<ConductorAssembly> {
        ConductorAssembly::new(
            "planar-pair",
            vec![
                CircularLoop::coaxial(0.0, self.r1 * reference.radius, self.i1 * reference.current)
                    .into(),
                CircularLoop::coaxial(0.0, self.r2 * reference.radius, self.i2 * reference.current)
                    .into(),
            ],
        )
    }
}

/// Anti-Helmholtz reference: loop radius `R` (m) and current `I` (A).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub radius: f64,
    pub current: f64,
}

impl Default for Reference {
    fn default() -> Self {
        Self {
            radius: 1.0,
            current: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarOptimum {
    pub config: PlanarConfig,
    /// |dB_z/dz| of the planar pair at the zero (T/m).
    pub gradient_2d: f64,
    /// Anti-Helmholtz gradient at equal power (T/m).
    pub gradient_3d: f64,
    pub gradient_ratio: f64,
    /// Power the planar pair needs to match the anti-Helmholtz gradient,
    /// relative to the anti-Helmholtz power.
    pub power_ratio: f64,
}

/// Axial field of the anti-Helmholtz pair per unit length at its zero (T/m).
pub fn anti_helmholtz_gradient(radius: f64, current: f64) -> f64 {
    48.0 * MU0 * current / (25.0 * 5f64.sqrt() * radius * radius)
}

/// On-axis field coefficient of a unit loop of radius `r` at height `z` and
/// its first two `z` derivatives, in units of `μ0 I / R^(n+1)`.
fn on_axis(r: f64, z: f64) -> [f64; 3] {
    let r2 = r * r;
    let s = r2 + z * z;
    [
        r2 / (2.0 * s.powf(1.5)),
        -3.0 * r2 * z / (2.0 * s.powf(2.5)),
        3.0 * r2 * (4.0 * z * z - r2) / (2.0 * s.powf(3.5)),
    ]
}

/// Relative curvature `f''/f` of a single loop; equal values for both loops
/// is the feasibility condition.
fn relative_curvature(r: f64, z: f64) -> f64 {
    let s = r * r + z * z;
    3.0 * (4.0 * z * z - r * r) / (s * s)
}

/// Currents normalised to the equal-power constraint for a current ratio.
fn equal_power_currents(r1: f64, r2: f64, ratio: f64) -> (f64, f64) {
    let i1 = (2.0 / (r1 + r2 * ratio * ratio)).sqrt();
    (i1, ratio * i1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSolution {
    /// `i2 / i1` giving zero field at `z0`.
    pub ratio: f64,
    /// `B_z''(z0)` in units of `μ0 I / R³`, with the currents normalised to
    /// equal power. Zero exactly on the feasible curve.
    pub curvature_residual: f64,
}

/// Current ratio that places the field zero at `z0`, and the curvature left over.
pub fn planar_current_solve(r1: f64, r2: f64, z0: f64) -> Result<CurrentSolution> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(TrapError::InvalidArgument(format!(
            "loop radii must be positive, got {r1} and {r2}"
        )));
    }
    if (r1 - r2).abs() <= 1e-12 * r1.max(r2) {
        return Err(TrapError::Degenerate(
            "equal radii give proportional fields; no independent zero".into(),
        ));
    }
    let f1 = on_axis(r1, z0);
    let f2 = on_axis(r2, z0);
    if f2[0] == 0.0 {
        return Err(TrapError::Degenerate(
            "outer loop has no field at z0".into(),
        ));
    }
    let ratio = -f1[0] / f2[0];
    let (i1, i2) = equal_power_currents(r1, r2, ratio);
    Ok(CurrentSolution {
        ratio,
        curvature_residual: i1 * f1[2] + i2 * f2[2],
    })
}

/// A point on the zero-curvature curve with its equal-power gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasiblePoint {
    pub config: PlanarConfig,
    /// |dB_z/dz| at `z0` in units of `μ0 I / R²`.
    pub gradient: f64,
}

/// Search settings for [`optimize_planar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarSearch {
    /// Upper bound for both radii, in units of `z0`.
    pub r_max_over_z0: f64,
    /// Grid points for the coarse `r1` scan.
    pub r1_steps: usize,
    /// Grid points for the sign-change scan in `r2`.
    pub r2_steps: usize,
    /// Golden-section tolerance in `r1`.
    pub r1_tolerance: f64,
}

impl Default for PlanarSearch {
    /// Radii up to `16 z0`, i.e. `8 R` for the anti-Helmholtz zero height `R/2`.
    fn default() -> Self {
        Self {
            r_max_over_z0: 16.0,
            r1_steps: 400,
            r2_steps: 2000,
            r1_tolerance: 1e-6,
        }
    }
}

/// Outer radius completing a feasible pair for inner radius `r1`: the first
/// sign change of the relative-curvature mismatch on `(r1, r_max]`, bisected
/// to `1e-10`.
fn partner_radius(r1: f64, z0: f64, r_max: f64, steps: usize) -> Option<f64> {
    let target = relative_curvature(r1, z0);
    let mismatch = |r2: f64| target - relative_curvature(r2, z0);
    let dr = (r_max - r1) / steps as f64;
    if !(dr > 0.0) {
        return None;
    }
    let mut lo = r1 + 1e-9 * dr;
    let mut flo = mismatch(lo);
    for k in 1..=steps {
        let hi = r1 + dr * k as f64;
        let fhi = mismatch(hi);
        if flo == 0.0 {
            return Some(lo);
        }
        if flo.signum() != fhi.signum() {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-10 {
                let mid = 0.5 * (a + b);
                if mismatch(mid).signum() == flo.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        lo = hi;
        flo = fhi;
    }
    None
}

fn feasible_point(r1: f64, z0: f64, search: &PlanarSearch) -> Option<FeasiblePoint> {
    let r_max = search.r_max_over_z0 * z0;
    let r2 = partner_radius(r1, z0, r_max, search.r2_steps)?;
    let f1 = on_axis(r1, z0);
    let f2 = on_axis(r2, z0);
    let (i1, i2) = equal_power_currents(r1, r2, -f1[0] / f2[0]);
    Some(FeasiblePoint {
        config: PlanarConfig { r1, r2, i1, i2, z0 },
        gradient: (i1 * f1[1] + i2 * f2[1]).abs(),
    })
}

/// Coarse scan of the feasible curve over `r1` (the curve a plot of optimum
/// candidates is drawn from).
pub fn feasible_curve(z0: f64, search: &PlanarSearch) -> Result<Vec<FeasiblePoint>> {
    validate_search(z0, search)?;
    let r_max = search.r_max_over_z0 * z0;
    let step = r_max / search.r1_steps as f64;
    Ok((1..search.r1_steps)
        .into_par_iter()
        .map(|k| feasible_point(step * k as f64, z0, search))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect())
}

fn validate_search(z0: f64, search: &PlanarSearch) -> Result<()> {
    if !(z0 > 0.0) || !z0.is_finite() {
        return Err(TrapError::InvalidArgument(format!(
            "zero height must be positive, got {z0}"
        )));
    }
    if !(search.r_max_over_z0 > 0.0) || search.r1_steps < 3 || search.r2_steps < 2 {
        return Err(TrapError::InvalidArgument("invalid search bounds".into()));
    }
    if !(search.r1_tolerance > 0.0) {
        return Err(TrapError::InvalidArgument(
            "r1 tolerance must be positive".into(),
        ));
    }
    Ok(())
}

/// Maximises the planar gradient at `z0` over the feasible curve at equal
/// power, and compares it with the anti-Helmholtz pair of the reference.
pub fn optimize_planar(
    z0: f64,
    reference: &Reference,
    search: &PlanarSearch,
) -> Result<PlanarOptimum> {
    validate_search(z0, search)?;
    if !(reference.radius > 0.0) || reference.current == 0.0 {
        return Err(TrapError::InvalidArgument(
            "reference needs positive radius and non-zero current".into(),
        ));
    }
    let r_max = search.r_max_over_z0 * z0;
    let step = r_max / search.r1_steps as f64;
    let scan: Vec<Option<FeasiblePoint>> = (1..search.r1_steps)
        .into_par_iter()
        .map(|k| feasible_point(step * k as f64, z0, search))
        .collect();
    let (best_k, _) = scan
        .iter()
        .enumerate()
        .filter_map(|(k, p)| p.map(|p| (k + 1, p.gradient)))
        .fold(None, |acc: Option<(usize, f64)>, (k, g)| match acc {
            Some((_, bg)) if bg >= g => acc,
            _ => Some((k, g)),
        })
        .ok_or_else(|| {
            TrapError::Infeasible(format!(
                "no zero-curvature configuration with radii below {r_max}"
            ))
        })?;

    // Golden-section refinement over the bracket around the best grid point.
    // Infeasible probes count as -inf.
    let objective =
        |r1: f64| feasible_point(r1, z0, search).map_or(f64::NEG_INFINITY, |p| p.gradient);
    let mut a = step * (best_k as f64 - 1.0).max(1e-3);
    let mut b = step * (best_k as f64 + 1.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > search.r1_tolerance {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let grid_best = scan[best_k - 1].expect("best index is feasible");
    let best = match feasible_point(0.5 * (a + b), z0, search) {
        Some(p) if p.gradient >= grid_best.gradient => p,
        _ => grid_best,
    };

    let unit = MU0 * reference.current / (reference.radius * reference.radius);
    let gradient_2d = best.gradient * unit.abs();
    let gradient_3d = anti_helmholtz_gradient(reference.radius, reference.current).abs();
    let gradient_ratio = gradient_3d / gradient_2d;
    // Planar currents scaled up to reach the 3D gradient, power compared directly.
    let boosted = PlanarConfig {
        i1: best.config.i1 * gradient_ratio,
        i2: best.config.i2 * gradient_ratio,
        ..best.config
    };
    Ok(PlanarOptimum {
        config: best.config,
        gradient_2d,
        gradient_3d,
        gradient_ratio,
        power_ratio: boosted.power_fraction(),
    })
}

/// One row of a miniaturisation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub scale: f64,
    /// Drive current holding the target gradient (A).
    pub current: f64,
    pub resistance: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    /// Fitted log-log exponents against scale.
    pub current_exponent: f64,
    pub resistance_exponent: f64,
    pub power_exponent: f64,
}

/// Scales the whole device (conductor geometry, path length ∝ s, cross-section
/// ∝ s²) and finds the drive current that keeps the strong-axis gradient at
/// `target_gradient` (T/m). The gradient per ampere is recomputed from the
/// field of each scaled assembly, with the zero searched from `guess · s`.
pub fn scaling_study(
    reference: &ConductorAssembly,
    guess: &Vec3,
    scales: &[f64],
    target_gradient: f64,
    conductor: &ConductorPath,
) -> Result<ScalingStudy> {
    if scales.is_empty() {
        return Err(TrapError::InvalidArgument("no scales given".into()));
    }
    if !(target_gradient > 0.0) {
        return Err(TrapError::InvalidArgument(format!(
            "target gradient must be positive, got {target_gradient}"
        )));
    }
    conductor.validate()?;
    let mut rows = Vec::with_capacity(scales.len());
    for &s in scales {
        let scaled = reference.scaled(s)?;
        let per_amp = trap_report(&scaled.with_drive_current(1.0), &(guess * s))?.strong_gradient();
        let current = target_gradient / per_amp;
        let path = conductor.scaled(s)?;
        let resistance = path.resistance();
        rows.push(ScalingRow {
            scale: s,
            current,
            resistance,
            power: crate::device::power(resistance, current),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.scale).collect();
    let fit = |ys: Vec<f64>| {
        loglog_slope(&xs, &ys).ok_or_else(|| {
            TrapError::InvalidArgument("need at least two distinct scales for exponent fit".into())
        })
    };
    Ok(ScalingStudy {
        current_exponent: fit(rows.iter().map(|r| r.current).collect())?,
        resistance_exponent: fit(rows.iter().map(|r| r.resistance).collect())?,
        power_exponent: fit(rows.iter().map(|r| r.power).collect())?,
        rows,
    })
}
