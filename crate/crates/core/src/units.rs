//! Conversions used at the I/O boundary. The library itself is SI throughout.

/// Tesla per gauss.
pub const TESLA_PER_GAUSS: f64 = 1e-4;

/// T/m per G/cm.
pub const TESLA_PER_METRE_PER_GAUSS_PER_CM: f64 = 1e-2;

pub fn tesla_to_gauss(b: f64) -> f64 {
    b / TESLA_PER_GAUSS
}

pub fn gauss_to_tesla(b: f64) -> f64 {
    b * TESLA_PER_GAUSS
}

/// T/m to G/cm.
pub fn gradient_to_gauss_per_cm(g: f64) -> f64 {
    g / TESLA_PER_METRE_PER_GAUSS_PER_CM
}

/// G/cm to T/m.
pub fn gradient_from_gauss_per_cm(g: f64) -> f64 {
    g * TESLA_PER_METRE_PER_GAUSS_PER_CM
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_units() {
        assert_eq!(gradient_to_gauss_per_cm(0.1), 10.0);
        assert!((gradient_from_gauss_per_cm(10.0) - 0.1).abs() < 1e-15);
        assert!((tesla_to_gauss(1e-4) - 1.0).abs() < 1e-15);
        assert!((gauss_to_tesla(1.0) - 1e-4).abs() < 1e-20);
    }
}
