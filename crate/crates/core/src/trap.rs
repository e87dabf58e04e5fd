//! Field-zero search, quadrupole characterisation and field maps.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

use crate::constants::MU0;
use crate::error::{Result, TrapError};
use crate::field::{assembly_field, field_jacobian, FieldSample, GradientTensor};
use crate::geometry::{cylinder_trap, ConductorAssembly, CylinderTrapParams, Vec3};

const MAX_NEWTON_ITERATIONS: usize = 50;
const MAX_HALVINGS: usize = 10;
/// Iterates further than this (in characteristic lengths) from the guess are
/// chasing the far-field decay, not a trap zero.
const MAX_EXCURSION: f64 = 10.0;
/// Convergence threshold on |B| relative to the assembly's field scale.
const ZERO_TOLERANCE: f64 = 1e-13;
/// Largest antisymmetric part (relative) accepted before eigenanalysis.
const ASYMMETRY_TOLERANCE: f64 = 1e-6;
/// Relative eigenvalue gap below which the weak pair is treated as degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Typical field magnitude produced by the assembly: `max μ0|I|/extent`.
pub fn field_scale(a: &ConductorAssembly) -> f64 {
    a.elements()
        .iter()
        .map(|e| MU0 * e.current().abs() / e.extent())
        .fold(0.0, f64::max)
}

/// Newton search for a point where B vanishes, starting at `guess`.
///
/// Steps are halved (up to ten times) whenever they fail to reduce |B|.
pub fn find_zero(a: &ConductorAssembly, guess: &Vec3) -> Result<Vec3> {
    let scale = field_scale(a);
    if scale == 0.0 {
        return Err(TrapError::Degenerate("assembly carries no current".into()));
    }
    let tol = ZERO_TOLERANCE * scale;
    let length = a.characteristic_length();

    let mut p = *guess;
    let mut b = assembly_field(a, &p)?;
    let mut residual = b.norm();
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let jac = field_jacobian(a, &p)?;
        let lu = jac.m.lu();
        let det = lu.determinant();
        let norm = jac.norm();
        if !(det.abs() > 1e-12 * norm * norm * norm) {
            return Err(TrapError::Degenerate(format!(
                "singular field Jacobian at ({:e}, {:e}, {:e})",
                p.x, p.y, p.z
            )));
        }
        if residual < tol {
            return Ok(p);
        }
        let step = lu
            .solve(&(-b))
            .ok_or_else(|| TrapError::Degenerate("singular field Jacobian".into()))?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = p + step * t;
            if let Ok(bt) = assembly_field(a, &trial) {
                if bt.norm() < residual {
                    accepted = Some((trial, bt));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, bt)) => {
                if (trial - guess).norm() > MAX_EXCURSION * length {
                    // walked off towards the vanishing far field
                    return Err(TrapError::NoConvergence {
                        iterations: MAX_NEWTON_ITERATIONS,
                        residual: bt.norm(),
                    });
                }
                p = trial;
                b = bt;
                residual = b.norm();
            }
            None => {
                // No decrease even for tiny steps: we are at the roundoff floor.
                if step.norm() < 1e-12 * length && residual < 1e3 * tol {
                    return Ok(p);
                }
                return Err(TrapError::NoConvergence {
                    iterations: MAX_NEWTON_ITERATIONS,
                    residual,
                });
            }
        }
    }
    if residual < tol {
        return Ok(p);
    }
    Err(TrapError::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        residual,
    })
}

/// Quadrupole characterisation at a field zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapReport {
    pub zero: Vec3,
    pub jacobian: GradientTensor,
    /// Eigenvalues (T/m), strongest first.
    pub eigenvalues: [f64; 3],
    /// Unit eigenvectors matching `eigenvalues`.
    pub axes: [Vec3; 3],
    /// Eigenvalues divided by the mean of the two weak ones; (-2, 1, 1) for an
    /// ideal quadrupole.
    pub ratio: [f64; 3],
}

impl TrapReport {
    /// Magnitude of the strong-axis gradient (T/m).
    pub fn strong_gradient(&self) -> f64 {
        self.eigenvalues[0].abs()
    }
}

/// Flips `v` so that its first non-negligible component is positive.
fn orient(v: Vec3) -> Vec3 {
    for c in v.iter() {
        if c.abs() > 1e-12 {
            return if *c < 0.0 { -v } else { v };
        }
    }
    v
}

/// Locates the zero from `guess` and decomposes the symmetrised Jacobian there.
pub fn trap_report(a: &ConductorAssembly, guess: &Vec3) -> Result<TrapReport> {
    let zero = find_zero(a, guess)?;
    let jacobian = field_jacobian(a, &zero)?;
    let norm = jacobian.norm();
    if norm == 0.0 {
        return Err(TrapError::Degenerate("vanishing field gradient".into()));
    }
    let asym = jacobian.asymmetry() / norm;
    if asym > ASYMMETRY_TOLERANCE {
        return Err(TrapError::Asymmetry(asym));
    }
    let (eigenvalues, axes) = ordered_eigensystem(&jacobian.symmetrized());
    let weak_mean = 0.5 * (eigenvalues[1] + eigenvalues[2]);
    if weak_mean == 0.0 {
        return Err(TrapError::Degenerate(
            "weak eigenvalues cancel; ratio undefined".into(),
        ));
    }
    let ratio = eigenvalues.map(|l| l / weak_mean);
    Ok(TrapReport {
        zero,
        jacobian,
        eigenvalues,
        axes,
        ratio,
    })
}

/// Eigenpairs ordered strong axis first, then by descending eigenvalue. When
/// the weak pair is degenerate its axes are fixed by projecting x, y, z onto
/// the weak plane and keeping the largest projection.
fn ordered_eigensystem(m: &Matrix3<f64>) -> ([f64; 3], [Vec3; 3]) {
    let eig = SymmetricEigen::new(*m);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .partial_cmp(&eig.eigenvalues[i].abs())
            .unwrap()
    });
    let strong = idx[0];
    let (mut w1, mut w2) = (idx[1], idx[2]);
    if eig.eigenvalues[w2] > eig.eigenvalues[w1] {
        std::mem::swap(&mut w1, &mut w2);
    }
    let values = [
        eig.eigenvalues[strong],
        eig.eigenvalues[w1],
        eig.eigenvalues[w2],
    ];
    let strong_axis = orient(eig.eigenvectors.column(strong).into_owned());
    let scale = values[0].abs();
    let axes = if (values[1] - values[2]).abs() <= DEGENERACY_TOLERANCE * scale {
        let mut best = Vec3::zeros();
        for basis in [Vec3::x(), Vec3::y(), Vec3::z()] {
            let proj = basis - strong_axis * strong_axis.dot(&basis);
            if proj.norm() > best.norm() + 1e-12 {
                best = proj;
            }
        }
        let first = orient(best.normalize());
        let second = orient(strong_axis.cross(&first));
        [strong_axis, first, second]
    } else {
        [
            strong_axis,
            orient(eig.eigenvectors.column(w1).into_owned()),
            orient(eig.eigenvectors.column(w2).into_owned()),
        ]
    };
    (values, axes)
}

/// One axis of a sampling grid: `count` evenly spaced points from `start` to
/// `end` inclusive. A single-point axis sits at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn point(v: f64) -> Self {
        Self {
            start: v,
            end: v,
            count: 1,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count <= 1 {
            self.start
        } else {
            self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

/// Rectangular sampling grid, parsed from `x=a:b:n,y=c,z=d:e:m`.
/// Axes missing from the text default to the single point 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub axes: [AxisRange; 3],
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in row-major order, x fastest.
    pub fn point(&self, index: usize) -> Vec3 {
        let nx = self.axes[0].count;
        let ny = self.axes[1].count;
        let i = index % nx;
        let j = (index / nx) % ny;
        let k = index / (nx * ny);
        Vec3::new(
            self.axes[0].value(i),
            self.axes[1].value(j),
            self.axes[2].value(k),
        )
    }

    /// Same grid with every coordinate multiplied by `s` (unit conversion).
    pub fn scaled(&self, s: f64) -> Self {
        let mut axes = self.axes;
        for a in &mut axes {
            a.start *= s;
            a.end *= s;
        }
        Self { axes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridParseError(pub String);

impl fmt::Display for GridParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid grid spec: {}", self.0)
    }
}

impl std::error::Error for GridParseError {}

impl FromStr for GridSpec {
    type Err = GridParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut axes: [Option<AxisRange>; 3] = [None, None, None];
        for part in s.split(',').map(str::trim) {
            let (name, spec) = part
                .split_once('=')
                .ok_or_else(|| GridParseError(format!("expected axis=value in '{part}'")))?;
            let slot = match name.trim() {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                other => return Err(GridParseError(format!("unknown axis '{other}'"))),
            };
            if axes[slot].is_some() {
                return Err(GridParseError(format!("axis '{name}' given twice")));
            }
            let num = |t: &str| -> std::result::Result<f64, GridParseError> {
                let v: f64 = t
                    .trim()
                    .parse()
                    .map_err(|_| GridParseError(format!("bad number '{t}'")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(GridParseError(format!("non-finite value '{t}'")))
                }
            };
            let fields: Vec<&str> = spec.split(':').collect();
            axes[slot] = Some(match fields.as_slice() {
                [v] => AxisRange::point(num(v)?),
                [a, b, n] => {
                    let count: usize = n
                        .trim()
                        .parse()
                        .map_err(|_| GridParseError(format!("bad point count '{n}'")))?;
                    if count == 0 {
                        return Err(GridParseError(format!("axis '{name}' has zero points")));
                    }
                    AxisRange {
                        start: num(a)?,
                        end: num(b)?,
                        count,
                    }
                }
                _ => {
                    return Err(GridParseError(format!(
                        "axis '{name}' must be 'v' or 'a:b:n'"
                    )))
                }
            });
        }
        Ok(GridSpec {
            axes: axes.map(|a| a.unwrap_or(AxisRange::point(0.0))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub grid: GridSpec,
    pub samples: Vec<FieldSample>,
}

/// Samples the field on every grid point (in parallel, output in grid order).
pub fn field_map(a: &ConductorAssembly, grid: &GridSpec) -> Result<FieldMap> {
    if grid.is_empty() {
        return Err(TrapError::InvalidArgument("empty grid".into()));
    }
    let results: Vec<Result<FieldSample>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let point = grid.point(i);
            assembly_field(a, &point).map(|b| FieldSample { point, b })
        })
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => samples.push(s),
            Err(TrapError::Singularity { element, .. }) => {
                return Err(TrapError::SingularGridPoint { index, element })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FieldMap {
        grid: *grid,
        samples,
    })
}

/// Strong-axis gradient as a function of drive current.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSweep {
    /// `(drive current A, strong-axis gradient T/m)`.
    pub rows: Vec<(f64, f64)>,
    /// Least-squares gradient per ampere (T/m/A), fitted through the origin.
    pub slope: f64,
    /// Largest deviation from `slope · I`, relative to the largest gradient.
    pub linearity_residual: f64,
}

/// Evaluates the trap gradient at each drive current.
pub fn gradient_vs_current(
    a: &ConductorAssembly,
    currents: &[f64],
    guess: &Vec3,
) -> Result<CurrentSweep> {
    if currents.is_empty() {
        return Err(TrapError::InvalidArgument("no currents given".into()));
    }
    if let Some(bad) = currents.iter().find(|i| !(**i > 0.0) || !i.is_finite()) {
        return Err(TrapError::InvalidArgument(format!(
            "drive currents must be positive, got {bad}"
        )));
    }
    let rows = currents
        .iter()
        .map(|&i| {
            Ok((
                i,
                trap_report(&a.with_drive_current(i), guess)?.strong_gradient(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let sxy: f64 = rows.iter().map(|(i, g)| i * g).sum();
    let sxx: f64 = rows.iter().map(|(i, _)| i * i).sum();
    let slope = sxy / sxx;
    let max_g = rows.iter().map(|(_, g)| g.abs()).fold(0.0, f64::max);
    let linearity_residual = rows
        .iter()
        .map(|(i, g)| (g - slope * i).abs())
        .fold(0.0, f64::max)
        / max_g;
    Ok(CurrentSweep {
        rows,
        slope,
        linearity_residual,
    })
}

/// Returns `a` with its drive scale set so that one ampere of drive current
/// produces a strong-axis gradient of `gradient_per_ampere` (T/m/A).
pub fn calibrate_drive(
    a: &ConductorAssembly,
    guess: &Vec3,
    gradient_per_ampere: f64,
) -> Result<ConductorAssembly> {
    if !(gradient_per_ampere > 0.0) {
        return Err(TrapError::InvalidArgument(format!(
            "gradient per ampere must be positive, got {gradient_per_ampere}"
        )));
    }
    let per_amp = trap_report(&a.with_drive_current(1.0), guess)?.strong_gradient();
    Ok(a.with_drive_scale_set(a.drive_scale() * gradient_per_ampere / per_amp))
}

/// Loop radius for which the cylinder trap's transverse and axial quadrupoles
/// combine into an exact -2:1:1 eigenvalue ratio, for the spacings in `p`.
///
/// Searched by bisection on `[lower, upper]`, outside the conductor ring.
pub fn balanced_loop_radius(p: &CylinderTrapParams, lower: f64, upper: f64) -> Result<f64> {
    // The Jacobian at the centre is diagonal; the transverse entry of the
    // straight-conductor quadrupole opposing the loops is the strong one, and
    // the other transverse entry must match the axial one.
    let mismatch = |r: f64| -> Result<f64> {
        let a = cylinder_trap(&CylinderTrapParams {
            loop_radius: r,
            ..*p
        })?;
        let g = field_jacobian(&a, &Vec3::zeros())?.m;
        let weak = if g[(0, 0)] * g[(2, 2)] > 0.0 { 0 } else { 1 };
        Ok(g[(weak, weak)] - g[(2, 2)])
    };
    let (mut lo, mut hi) = (lower, upper);
    let (mut flo, fhi) = (mismatch(lo)?, mismatch(hi)?);
    if flo.signum() == fhi.signum() {
        return Err(TrapError::Infeasible(format!(
            "no balanced loop radius in [{lower}, {upper}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = mismatch(mid)?;
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
