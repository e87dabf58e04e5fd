//! Unit selection and deterministic number formatting.

use clap::ValueEnum;
use quadtrap::units;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldUnit {
    Gauss,
    Tesla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LengthUnit {
    Mm,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub field: FieldUnit,
    pub length: LengthUnit,
}

#[derive(Debug, Serialize)]
pub struct UnitLabels {
    pub length: &'static str,
    pub field: &'static str,
    pub gradient: &'static str,
}

impl Units {
    /// Metres per display length unit.
    pub fn metres_per_length(&self) -> f64 {
        match self.length {
            LengthUnit::Mm => 1e-3,
            LengthUnit::M => 1.0,
        }
    }

    pub fn length_out(&self, metres: f64) -> f64 {
        match self.length {
            LengthUnit::Mm => metres * 1e3,
            LengthUnit::M => metres,
        }
    }

    pub fn field_out(&self, tesla: f64) -> f64 {
        match self.field {
            FieldUnit::Gauss => units::tesla_to_gauss(tesla),
            FieldUnit::Tesla => tesla,
        }
    }

    /// Gradients are shown in G/cm with gauss output, T/m with tesla output.
    pub fn gradient_out(&self, tesla_per_metre: f64) -> f64 {
        match self.field {
            FieldUnit::Gauss => units::gradient_to_gauss_per_cm(tesla_per_metre),
            FieldUnit::Tesla => tesla_per_metre,
        }
    }

    pub fn gradient_in(&self, value: f64) -> f64 {
        match self.field {
            FieldUnit::Gauss => units::gradient_from_gauss_per_cm(value),
            FieldUnit::Tesla => value,
        }
    }

    pub fn labels(&self) -> UnitLabels {
        UnitLabels {
            length: match self.length {
                LengthUnit::Mm => "mm",
                LengthUnit::M => "m",
            },
            field: match self.field {
                FieldUnit::Gauss => "G",
                FieldUnit::Tesla => "T",
            },
            gradient: match self.field {
                FieldUnit::Gauss => "G/cm",
                FieldUnit::Tesla => "T/m",
            },
        }
    }

    /// Parses a length such as `15mm`, `0.015m` or `15` (display unit), in metres.
    pub fn parse_length(&self, text: &str) -> Result<f64, String> {
        let t = text.trim();
        let (number, scale) = if let Some(n) = t.strip_suffix("mm") {
            (n, 1e-3)
        } else if let Some(n) = t.strip_suffix('m') {
            (n, 1.0)
        } else {
            (t, self.metres_per_length())
        };
        let v: f64 = number
            .trim()
            .parse()
            .map_err(|_| format!("invalid length '{text}'"))?;
        if !v.is_finite() {
            return Err(format!("invalid length '{text}'"));
        }
        Ok(v * scale)
    }
}

/// Shortest round-trip representation; exponent form outside [1e-5, 1e16).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [
            0.0,
            1.0,
            -2.5,
            1e-7,
            1.0790115426878555e-6,
            123456.789,
            6.02e23,
            -3.3e-12,
        ] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(0.144), "0.144");
    }

    #[test]
    fn lengths_with_suffixes() {
        let u = Units {
            field: FieldUnit::Gauss,
            length: LengthUnit::Mm,
        };
        assert_eq!(u.parse_length("15mm").unwrap(), 15e-3);
        assert_eq!(u.parse_length("0.015m").unwrap(), 0.015);
        assert_eq!(u.parse_length("15").unwrap(), 15e-3);
        assert!(u.parse_length("abc").is_err());
        assert!(u.parse_length("").is_err());
    }
}
