//! Complete elliptic integrals of the first and second kind.
//!
//! Both integrals come out of a single arithmetic-geometric mean run:
//! `K(m) = π / (2 a_N)` and `E(m) = K(m) (1 - Σ 2^(n-1) c_n²)`, with
//! `a_0 = 1`, `b_0 = √(1-m)`, `c_0 = √m`. Convergence is quadratic, so the
//! iteration cap is never approached for `m < 1`.

use std::f64::consts::PI;

use crate::error::{Result, TrapError};

const MAX_ITERATIONS: usize = 64;
const TOLERANCE: f64 = 1e-15;

/// `(K(m), E(m))` for parameter `m = k²` in `[0, 1)`.
pub fn elliptic_ke(m: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&m) {
        return Err(TrapError::Domain(format!(
            "elliptic parameter must satisfy 0 <= m < 1, got {m}"
        )));
    }
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut weight = 0.5;
    let mut sum = weight * c * c;
    for _ in 0..MAX_ITERATIONS {
        if c.abs() <= TOLERANCE * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let k = PI / (2.0 * a);
    Ok((k, k * (1.0 - sum)))
}

/// Series coefficients of `D(m) / (π m²)`, where
/// `D(m) = (1 - m/2) E(m) - (1 - m) K(m)`.
const D_SERIES: [f64; 8] = [
    3.0 / 32.0,
    3.0 / 128.0,
    45.0 / 4096.0,
    105.0 / 16384.0,
    2205.0 / 524288.0,
    6237.0 / 2097152.0,
    297297.0 / 134217728.0,
    85579065.0 / 4294967296.0,
];

/// Below this `m` the direct difference in `D(m)` loses too many digits.
const D_SERIES_LIMIT: f64 = 0.03;

/// `D(m) / m²` with `D(m) = (1 - m/2) E(m) - (1 - m) K(m)`.
///
/// `D` vanishes like `m²` and governs the radial field of a loop close to its
/// axis, where evaluating it as a difference cancels catastrophically.
pub(crate) fn radial_combination_over_m2(m: f64, k: f64, e: f64) -> f64 {
    if m < D_SERIES_LIMIT {
        PI * D_SERIES.iter().rev().fold(0.0, |acc, c| acc * m + c)
    } else {
        ((1.0 - 0.5 * m) * e - (1.0 - m) * k) / (m * m)
    }
}
