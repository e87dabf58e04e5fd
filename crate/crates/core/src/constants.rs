//! Fixed physical constants (SI).

use std::f64::consts::PI;

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 4.0e-7 * PI;

/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380649e-23;

/// Mass of a rubidium-87 atom, kg.
pub const MASS_RB87: f64 = 1.44316e-25;

/// Natural linewidth of the Rb-87 D2 cooling transition, MHz.
pub const NATURAL_LINEWIDTH_MHZ: f64 = 6.065;
