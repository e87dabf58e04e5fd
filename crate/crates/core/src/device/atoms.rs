use std::f64::consts::PI;

/// Empirical atom-number model: a power law in beam diameter times a
/// plateau factor in field gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomNumberModel {
    /// Atom number at `d_ref` inside the plateau.
    pub n_ref: f64,
    /// Reference beam diameter, m.
    pub d_ref: f64,
    pub exponent: f64,
    /// Quoted uncertainty of `exponent`. Metadata only.
    pub exponent_uncertainty: f64,
    /// Gradient range (G/cm) with full atom number.
    pub plateau: (f64, f64),
    /// Fractional loss one octave outside the plateau.
    pub rolloff: f64,
}

impl Default for AtomNumberModel {
    fn default() -> Self {
        Self {
            n_ref: 1.0e8,
            d_ref: 15e-3,
            exponent: 5.82,
            exponent_uncertainty: 0.05,
            plateau: (7.0, 20.0),
            rolloff: 0.5,
        }
    }
}

impl AtomNumberModel {
    /// Multiplier in `[0, 1]` for operating at `gradient` (G/cm).
    ///
    /// With `t` the distance outside the plateau in octaves, the factor
    /// follows a cosine ramp from 1 down to `1 - rolloff` at `t = 1` and
    /// then decays as `(1 - rolloff)^t`.
    pub fn plateau_factor(&self, gradient: f64) -> f64 {
        let (lo, hi) = self.plateau;
        let octaves = if gradient < lo {
            if gradient <= 0.0 {
                return 0.0;
            }
            (lo / gradient).log2()
        } else if gradient > hi {
            (gradient / hi).log2()
        } else {
            return 1.0;
        };
        let floor = 1.0 - self.rolloff;
        if octaves <= 1.0 {
            1.0 - self.rolloff * 0.5 * (1.0 - (PI * octaves).cos())
        } else {
            floor.powf(octaves)
        }
    }
}

/// Expected atom number for beam diameter `diameter` (m) at `gradient` (G/cm).
pub fn atom_number_estimate(diameter: f64, gradient: f64, model: &AtomNumberModel) -> f64 {
    model.n_ref * (diameter / model.d_ref).powf(model.exponent) * model.plateau_factor(gradient)
}
