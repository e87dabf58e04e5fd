//! Magnetic field of filament assemblies and its spatial derivatives.
//!
//! Fields are closed-form Biot-Savart results: circular loops through complete
//! elliptic integrals, straight segments through the finite-wire formula.
//! Derivatives are taken numerically from these fields.

use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::constants::MU0;
use crate::elliptic::{elliptic_ke, radial_combination_over_m2};
use crate::error::{Result, TrapError};
use crate::geometry::{CircularLoop, Conductor, ConductorAssembly, StraightSegment, Vec3};

/// Points closer than this to a filament are treated as singular.
pub const SINGULARITY_GUARD: f64 = 1e-9;

/// Field value at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: Vec3,
    pub b: Vec3,
}

/// Spatial derivative `m[(i, j)] = ∂B_i/∂x_j` (T/m) at `point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientTensor {
    pub m: Matrix3<f64>,
    pub point: Vec3,
}

impl GradientTensor {
    /// Divergence of B.
    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// `‖m - mᵀ‖`, proportional to the curl of B.
    pub fn asymmetry(&self) -> f64 {
        (self.m - self.m.transpose()).norm()
    }

    pub fn symmetrized(&self) -> Matrix3<f64> {
        0.5 * (self.m + self.m.transpose())
    }

    /// Directional derivative of the `axis` field component along `axis`.
    pub fn along(&self, axis: &Vec3) -> f64 {
        axis.dot(&(self.m * axis))
    }
}

/// Axial field of `l` at signed distance `z` from the loop plane, on its axis.
pub fn loop_field_on_axis(l: &CircularLoop, z: f64) -> f64 {
    let r2 = l.radius * l.radius;
    MU0 * l.current * r2 / (2.0 * (r2 + z * z).powf(1.5))
}

/// Exact field of a circular filament at any point off the wire.
pub fn loop_field(l: &CircularLoop, p: &Vec3) -> Result<Vec3> {
    let a = l.radius;
    let d = p - l.center;
    let z = d.dot(&l.axis);
    let radial = d - z * l.axis;
    let rho = radial.norm();

    let distance = ((rho - a).powi(2) + z * z).sqrt();
    if distance < SINGULARITY_GUARD {
        return Err(TrapError::Singularity {
            element: 0,
            distance,
        });
    }

    let r2 = rho * rho + z * z;
    let alpha2 = a * a + r2 - 2.0 * a * rho;
    let beta2 = a * a + r2 + 2.0 * a * rho;
    let beta = beta2.sqrt();
    let m = 4.0 * a * rho / beta2;
    let (k, e) = elliptic_ke(m)?;
    let c = MU0 * l.current / PI;

    let bz = c / (2.0 * alpha2 * beta) * ((a * a - r2) * e + alpha2 * k);
    // B_rho = C z β D(m) / (2 α² ρ), rewritten with m²/ρ = 16 a² ρ / β⁴ so the
    // axis (ρ = 0) needs no special case.
    let d_over_m2 = radial_combination_over_m2(m, k, e);
    let b_rho = 8.0 * c * z * a * a * rho * d_over_m2 / (alpha2 * beta2 * beta);

    let b_radial = if rho > 0.0 {
        radial * (b_rho / rho)
    } else {
        Vec3::zeros()
    };
    Ok(b_radial + l.axis * bz)
}

/// Field of a finite straight filament.
pub fn segment_field(s: &StraightSegment, p: &Vec3) -> Result<Vec3> {
    let dl = s.end - s.start;
    let len = dl.norm();
    let r1 = p - s.start;
    let r2 = p - s.end;

    let t = (r1.dot(&dl) / (len * len)).clamp(0.0, 1.0);
    let distance = (r1 - t * dl).norm();
    if distance < SINGULARITY_GUARD {
        return Err(TrapError::Singularity {
            element: 0,
            distance,
        });
    }

    let cross = dl.cross(&r1);
    if cross.norm_squared() == 0.0 {
        // on the line but beyond the ends
        return Ok(Vec3::zeros());
    }
    let (n1, n2) = (r1.norm(), r2.norm());
    let sum = n1 + n2;
    let factor = MU0 * s.current / (4.0 * PI) * 2.0 * sum / (n1 * n2 * (sum * sum - len * len));
    Ok(cross * factor)
}

fn element_field(e: &Conductor, p: &Vec3) -> Result<Vec3> {
    match e {
        Conductor::Loop(l) => loop_field(l, p),
        Conductor::Segment(s) => segment_field(s, p),
    }
}

/// Superposed field of every element, summed in element order.
pub fn assembly_field(a: &ConductorAssembly, p: &Vec3) -> Result<Vec3> {
    let mut b = Vec3::zeros();
    for (i, e) in a.elements().iter().enumerate() {
        b += element_field(e, p).map_err(|err| match err {
            TrapError::Singularity { distance, .. } => TrapError::Singularity {
                element: i,
                distance,
            },
            other => other,
        })?;
    }
    Ok(b)
}

/// Base finite-difference step for an assembly.
pub fn jacobian_step(a: &ConductorAssembly) -> f64 {
    (1e-4 * a.characteristic_length()).max(1e-6)
}

/// Central-difference Jacobian of B with one level of Richardson extrapolation.
pub fn field_jacobian(a: &ConductorAssembly, p: &Vec3) -> Result<GradientTensor> {
    let h = jacobian_step(a);
    let central = |j: usize, step: f64| -> Result<Vec3> {
        let mut dp = Vec3::zeros();
        dp[j] = step;
        let plus = assembly_field(a, &(p + dp))?;
        let minus = assembly_field(a, &(p - dp))?;
        Ok((plus - minus) / (2.0 * step))
    };
    let mut m = Matrix3::zeros();
    for j in 0..3 {
        let coarse = central(j, h)?;
        let fine = central(j, 0.5 * h)?;
        m.set_column(j, &((4.0 * fine - coarse) / 3.0));
    }
    Ok(GradientTensor { m, point: *p })
}

/// Second derivative of `B·axis` along `axis` (five-point stencil).
pub fn axial_second_derivative(a: &ConductorAssembly, p: &Vec3, axis: &Vec3) -> Result<f64> {
    let n = axis.normalize();
    let h = 2e-3 * a.characteristic_length();
    let f = |k: f64| -> Result<f64> { Ok(assembly_field(a, &(p + n * (k * h)))?.dot(&n)) };
    let (m2, m1, c, p1, p2) = (f(-2.0)?, f(-1.0)?, f(0.0)?, f(1.0)?, f(2.0)?);
    Ok((-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h))
}
