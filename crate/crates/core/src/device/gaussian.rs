//! Damped Gauss-Newton (Levenberg-Marquardt) fit of a 1-D Gaussian on a
//! constant background: `A exp(-(x-μ)²/(2σ²)) + c`.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Result, TrapError};

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
    pub offset: f64,
    /// RMS residual.
    pub residual: f64,
    pub iterations: usize,
}

fn model(p: &Vector4<f64>, x: f64) -> f64 {
    let u = (x - p[1]) / p[2];
    p[0] * (-0.5 * u * u).exp() + p[3]
}

fn cost(p: &Vector4<f64>, profile: &[(f64, f64)]) -> f64 {
    profile
        .iter()
        .map(|&(x, y)| (model(p, x) - y).powi(2))
        .sum()
}

/// Moment-based starting point.
fn initial_guess(profile: &[(f64, f64)]) -> Result<Vector4<f64>> {
    let (lo, hi) = profile
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(y), hi.max(y))
        });
    let amplitude = hi - lo;
    if !(amplitude > 1e-12 * hi.abs().max(lo.abs())) {
        return Err(TrapError::Degenerate("flat profile".into()));
    }
    let weight: f64 = profile.iter().map(|&(_, y)| y - lo).sum();
    let center = profile.iter().map(|&(x, y)| x * (y - lo)).sum::<f64>() / weight;
    let var = profile
        .iter()
        .map(|&(x, y)| (x - center).powi(2) * (y - lo))
        .sum::<f64>()
        / weight;
    if !(var > 0.0) {
        return Err(TrapError::Degenerate("profile has no width".into()));
    }
    Ok(Vector4::new(amplitude, center, var.sqrt(), lo))
}

/// Fits `profile` (position, value) pairs; needs at least five points.
pub fn fit_gaussian_1d(profile: &[(f64, f64)]) -> Result<GaussianFit> {
    if profile.len() < 5 {
        return Err(TrapError::InsufficientData(format!(
            "need at least 5 points, got {}",
            profile.len()
        )));
    }
    if profile
        .iter()
        .any(|(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(TrapError::InvalidData("non-finite profile value".into()));
    }
    let mut p = initial_guess(profile)?;
    let mut c = cost(&p, profile);
    let mut lambda = 1e-3;

    for iteration in 1..=MAX_ITERATIONS {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for &(x, y) in profile {
            let u = (x - p[1]) / p[2];
            let e = (-0.5 * u * u).exp();
            let j = Vector4::new(e, p[0] * e * u / p[2], p[0] * e * u * u / p[2], 1.0);
            jtj += j * j.transpose();
            jtr += j * (model(&p, x) - y);
        }

        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] *= 1.0 + lambda;
            }
            let Some(step) = damped.cholesky().map(|ch| ch.solve(&(-jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let tc = cost(&trial, profile);
            if trial[2] != 0.0 && tc.is_finite() && tc <= c {
                let small_step = step
                    .iter()
                    .zip(trial.iter())
                    .all(|(d, v)| d.abs() <= 1e-12 * (v.abs() + 1e-12));
                let small_gain = c - tc <= 1e-15 * c;
                p = trial;
                c = tc;
                lambda = (lambda * 0.1).max(1e-12);
                improved = true;
                if small_step || small_gain {
                    return Ok(finish(p, c, profile.len(), iteration));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: we are at the minimum to roundoff
            return Ok(finish(p, c, profile.len(), iteration));
        }
    }
    Err(TrapError::FitFailure {
        iterations: MAX_ITERATIONS,
        residual: (c / profile.len() as f64).sqrt(),
    })
}

fn finish(p: Vector4<f64>, cost: f64, n: usize, iterations: usize) -> GaussianFit {
    GaussianFit {
        amplitude: p[0],
        center: p[1],
        sigma: p[2].abs(),
        offset: p[3],
        residual: (cost / n as f64).sqrt(),
        iterations,
    }
}
