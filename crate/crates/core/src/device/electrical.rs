use crate::error::{Result, TrapError};

/// Current path through a conductor of uniform cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductorPath {
    /// m
    pub length: f64,
    /// m²
    pub cross_section: f64,
    /// Ω·m
    pub resistivity: f64,
}

impl Default for ConductorPath {
    /// Heat-treated AlSi10Mg, 0.2 m long, 15 mm² cross-section (about 667 μΩ).
    fn default() -> Self {
        Self {
            length: 0.2,
            cross_section: 1.5e-5,
            resistivity: 5e-8,
        }
    }
}

impl ConductorPath {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length", self.length),
            ("cross_section", self.cross_section),
            ("resistivity", self.resistivity),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(TrapError::InvalidArgument(format!(
                    "conductor {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// ρ L / A in ohms.
    pub fn resistance(&self) -> f64 {
        self.resistivity * self.length / self.cross_section
    }

    /// Uniformly scaled conductor: length × s, cross-section × s².
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(TrapError::InvalidArgument(format!(
                "scale factor must be positive, got {s}"
            )));
        }
        Ok(Self {
            length: self.length * s,
            cross_section: self.cross_section * s * s,
            resistivity: self.resistivity,
        })
    }
}

/// Ohmic dissipation `Z I²` (W).
pub fn power(resistance: f64, current: f64) -> f64 {
    resistance * current * current
}

/// A (current A, red detuning MHz) calibration point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningPoint {
    pub current: f64,
    pub detuning_mhz: f64,
}

/// Measured constants of the printed prototype.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceCalibration {
    /// Ω
    pub resistance: f64,
    /// Quoted uncertainty of `resistance` (Ω). Metadata only.
    pub resistance_uncertainty: f64,
    /// Strong-axis gradient per ampere, G/cm/A.
    pub gradient_per_ampere: f64,
    pub detuning_lo: DetuningPoint,
    pub detuning_hi: DetuningPoint,
}

impl Default for DeviceCalibration {
    /// 640 μΩ, 10 G/cm at 15 A, detuning 16 MHz at 4 A to 25 MHz at 25 A.
    fn default() -> Self {
        Self {
            resistance: 640e-6,
            resistance_uncertainty: 4e-6,
            gradient_per_ampere: 10.0 / 15.0,
            detuning_lo: DetuningPoint {
                current: 4.0,
                detuning_mhz: 16.0,
            },
            detuning_hi: DetuningPoint {
                current: 25.0,
                detuning_mhz: 25.0,
            },
        }
    }
}

impl DeviceCalibration {
    /// Gradient calibration implied by the 4-50 A / 3.2-40 G/cm range (0.8 G/cm/A).
    pub fn wide_range() -> Self {
        Self {
            gradient_per_ampere: 0.8,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resistance > 0.0) {
            return Err(TrapError::InvalidArgument(
                "resistance must be positive".into(),
            ));
        }
        if !(self.gradient_per_ampere > 0.0) {
            return Err(TrapError::InvalidArgument(
                "gradient per ampere must be positive".into(),
            ));
        }
        if !(self.detuning_hi.current > self.detuning_lo.current) {
            return Err(TrapError::InvalidArgument(
                "detuning calibration currents must increase".into(),
            ));
        }
        Ok(())
    }
}

/// Strong-axis gradient (G/cm) at drive current `current` (A).
pub fn current_to_gradient(current: f64, cal: &DeviceCalibration) -> f64 {
    cal.gradient_per_ampere * current
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detuning {
    /// Red detuning, MHz.
    pub mhz: f64,
    /// Set when the current was outside the calibrated range and clamped.
    pub clamped: bool,
}

/// Peak red detuning for a drive current, interpolated linearly between the
/// calibration points and clamped outside them.
pub fn detuning_for_current(current: f64, cal: &DeviceCalibration) -> Detuning {
    let (lo, hi) = (cal.detuning_lo, cal.detuning_hi);
    let clamped = current < lo.current || current > hi.current;
    let i = current.clamp(lo.current, hi.current);
    let mhz = if i == hi.current {
        hi.detuning_mhz
    } else {
        let t = (i - lo.current) / (hi.current - lo.current);
        lo.detuning_mhz + t * (hi.detuning_mhz - lo.detuning_mhz)
    };
    Detuning { mhz, clamped }
}
