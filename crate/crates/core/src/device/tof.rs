use crate::constants::{KB, MASS_RB87};
use crate::error::{Result, TrapError};
use crate::stats::linear_fit;

/// Gaussian cloud radius measured after a time of flight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TofSample {
    /// s
    pub t: f64,
    /// m
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TofFit {
    /// K
    pub temperature: f64,
    /// Initial cloud radius, m.
    pub sigma0: f64,
    /// RMS residual of the σ² fit, m².
    pub residual: f64,
    /// The fitted expansion slope was negative and the temperature clamped to 0.
    pub degenerate: bool,
}

/// Ballistic expansion `σ(t) = √(σ0² + kB T t² / m)` for ⁸⁷Rb.
pub fn expansion_sigma(temperature: f64, sigma0: f64, t: f64) -> f64 {
    (sigma0 * sigma0 + KB * temperature / MASS_RB87 * t * t).sqrt()
}

/// Temperature and initial size from a straight-line fit of σ² against t².
pub fn tof_fit(samples: &[TofSample]) -> Result<TofFit> {
    if samples.len() < 3 {
        return Err(TrapError::InsufficientData(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    if let Some(s) = samples
        .iter()
        .find(|s| !(s.t >= 0.0) || !(s.sigma > 0.0) || !s.t.is_finite() || !s.sigma.is_finite())
    {
        return Err(TrapError::InvalidData(format!(
            "sample (t={}, sigma={}) needs t >= 0 and sigma > 0",
            s.t, s.sigma
        )));
    }
    let t2: Vec<f64> = samples.iter().map(|s| s.t * s.t).collect();
    let s2: Vec<f64> = samples.iter().map(|s| s.sigma * s.sigma).collect();
    let (slope, intercept) = linear_fit(&t2, &s2)
        .ok_or_else(|| TrapError::InsufficientData("all samples share one time".into()))?;
    let residual = (t2
        .iter()
        .zip(&s2)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / t2.len() as f64)
        .sqrt();
    let degenerate = slope < 0.0;
    if degenerate {
        // no expansion: the cloud size is just the mean σ²
        let mean = s2.iter().sum::<f64>() / s2.len() as f64;
        return Ok(TofFit {
            temperature: 0.0,
            sigma0: mean.sqrt(),
            residual,
            degenerate,
        });
    }
    if !(intercept > 0.0) {
        return Err(TrapError::InvalidData(format!(
            "fitted initial size squared is non-positive ({intercept:e} m²)"
        )));
    }
    Ok(TofFit {
        temperature: MASS_RB87 * slope / KB,
        sigma0: intercept.sqrt(),
        residual,
        degenerate,
    })
}
