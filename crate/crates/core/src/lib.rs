//! Magnetostatic design tools for compact quadrupole atom traps.
//!
//! Conductors are modelled as thin filaments (circular loops and straight
//! segments). Fields are evaluated with closed-form Biot-Savart expressions,
//! and everything in the library works in SI units: metres, amperes, tesla.
//! Gauss-based units only appear at the I/O boundary (see [`units`]).
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] - conductor primitives, assemblies and the standard trap builders
//! * [`elliptic`] - complete elliptic integrals for off-axis loop fields
//! * [`field`] - field, Jacobian and curvature evaluation
//! * [`trap`] - zero finding, quadrupole characterisation and field maps
//! * [`planar`] - planar (single-plane) versus two-plane coil comparison and scaling laws
//! * [`device`] - electrical, atom-number and thermometry models of a printed trap

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod device;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod geometry;
pub mod planar;
pub mod stats;
pub mod trap;
pub mod units;

pub use error::{Result, TrapError};
pub use geometry::{
    anti_helmholtz, cylinder_trap, CircularLoop, Conductor, ConductorAssembly, CylinderTrapParams,
    StraightSegment, Vec3, Violation,
};
