//! Models of the printed trap as a device: electrical load, current to
//! gradient calibration, detuning schedule, atom number and cloud thermometry.

mod atoms;
mod electrical;
mod gaussian;
mod tof;

pub use atoms::{atom_number_estimate, AtomNumberModel};
pub use electrical::{
    current_to_gradient, detuning_for_current, power, ConductorPath, Detuning, DetuningPoint,
    DeviceCalibration,
};
pub use gaussian::{fit_gaussian_1d, GaussianFit};
pub use tof::{expansion_sigma, tof_fit, TofFit, TofSample};
