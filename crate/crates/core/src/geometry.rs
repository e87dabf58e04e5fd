//! Conductor primitives, assemblies and the standard trap geometries.

use std::fmt;

use nalgebra::{Rotation3, Vector3};

use crate::error::{Result, TrapError};

/// Position (m) or field (T) vector, depending on context.
pub type Vec3 = Vector3<f64>;

/// Tolerance on `|axis| = 1` for loop axes.
const AXIS_NORM_TOL: f64 = 1e-12;

/// Thin circular current loop. Positive current circulates right-handed about `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularLoop {
    pub center: Vec3,
    pub axis: Vec3,
    pub radius: f64,
    pub current: f64,
}

impl CircularLoop {
    /// Builds a loop, normalising `axis`. A zero axis is kept as NaN and
    /// reported by [`ConductorAssembly::validate`].
    pub fn new(center: Vec3, axis: Vec3, radius: f64, current: f64) -> Self {
        Self {
            center,
            axis: axis / axis.norm(),
            radius,
            current,
        }
    }

    /// Loop in a plane of constant `z`, centred on the z axis.
    pub fn coaxial(z: f64, radius: f64, current: f64) -> Self {
        Self::new(Vec3::new(0.0, 0.0, z), Vec3::z(), radius, current)
    }
}

/// Thin straight conductor; current flows from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightSegment {
    pub start: Vec3,
    pub end: Vec3,
    pub current: f64,
}

impl StraightSegment {
    pub fn new(start: Vec3, end: Vec3, current: f64) -> Self {
        Self {
            start,
            end,
            current,
        }
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conductor {
    Loop(CircularLoop),
    Segment(StraightSegment),
}

impl Conductor {
    pub fn current(&self) -> f64 {
        match self {
            Conductor::Loop(l) => l.current,
            Conductor::Segment(s) => s.current,
        }
    }

    /// Largest linear dimension: loop diameter or segment length.
    pub fn extent(&self) -> f64 {
        match self {
            Conductor::Loop(l) => 2.0 * l.radius,
            Conductor::Segment(s) => s.length(),
        }
    }

    /// Loop centre or segment midpoint.
    pub fn center(&self) -> Vec3 {
        match self {
            Conductor::Loop(l) => l.center,
            Conductor::Segment(s) => 0.5 * (s.start + s.end),
        }
    }

    fn with_current(self, current: f64) -> Self {
        match self {
            Conductor::Loop(l) => Conductor::Loop(CircularLoop { current, ..l }),
            Conductor::Segment(s) => Conductor::Segment(StraightSegment { current, ..s }),
        }
    }

    fn scaled(self, s: f64) -> Self {
        match self {
            Conductor::Loop(l) => Conductor::Loop(CircularLoop {
                center: l.center * s,
                radius: l.radius * s,
                ..l
            }),
            Conductor::Segment(g) => Conductor::Segment(StraightSegment {
                start: g.start * s,
                end: g.end * s,
                ..g
            }),
        }
    }

    fn transformed(self, rotation: &Rotation3<f64>, translation: &Vec3) -> Self {
        match self {
            Conductor::Loop(l) => Conductor::Loop(CircularLoop {
                center: rotation * l.center + translation,
                axis: rotation * l.axis,
                ..l
            }),
            Conductor::Segment(g) => Conductor::Segment(StraightSegment {
                start: rotation * g.start + translation,
                end: rotation * g.end + translation,
                ..g
            }),
        }
    }

    fn violations(&self, index: usize, out: &mut Vec<Violation>) {
        let mut push = |rule| {
            out.push(Violation {
                element: index,
                rule,
            })
        };
        if !self.current().is_finite() {
            push("finite current");
        }
        match self {
            Conductor::Loop(l) => {
                if !(l.center.iter().all(|v| v.is_finite())) {
                    push("finite components");
                }
                if !(l.radius > 0.0) || !l.radius.is_finite() {
                    push("radius > 0");
                }
                if !((l.axis.norm() - 1.0).abs() <= AXIS_NORM_TOL) {
                    push("unit axis");
                }
            }
            Conductor::Segment(s) => {
                if !(s.start.iter().chain(s.end.iter()).all(|v| v.is_finite())) {
                    push("finite components");
                }
                if s.start == s.end {
                    push("degenerate segment");
                }
            }
        }
    }
}

impl From<CircularLoop> for Conductor {
    fn from(l: CircularLoop) -> Self {
        Conductor::Loop(l)
    }
}

impl From<StraightSegment> for Conductor {
    fn from(s: StraightSegment) -> Self {
        Conductor::Segment(s)
    }
}

/// A broken element invariant, as reported by [`ConductorAssembly::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: usize,
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "element {}: {}", self.element, self.rule)
    }
}

/// Immutable set of conductors acting together as one field source.
///
/// `drive_scale` is the element-current multiplier per ampere of external
/// drive current; see [`ConductorAssembly::with_drive_current`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConductorAssembly {
    label: String,
    elements: Vec<Conductor>,
    drive_scale: f64,
}

impl ConductorAssembly {
    pub fn new(label: impl Into<String>, elements: Vec<Conductor>) -> Result<Self> {
        Self::with_drive_scale(label, elements, 1.0)
    }

    pub fn with_drive_scale(
        label: impl Into<String>,
        elements: Vec<Conductor>,
        drive_scale: f64,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(TrapError::InvalidArgument(
                "assembly needs at least one element".into(),
            ));
        }
        if !drive_scale.is_finite() {
            return Err(TrapError::InvalidArgument(format!(
                "drive scale must be finite, got {drive_scale}"
            )));
        }
        Ok(Self {
            label: label.into(),
            elements,
            drive_scale,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> &[Conductor] {
        &self.elements
    }

    pub fn drive_scale(&self) -> f64 {
        self.drive_scale
    }

    /// Largest element extent; the length scale used for finite-difference steps.
    pub fn characteristic_length(&self) -> f64 {
        self.elements
            .iter()
            .map(Conductor::extent)
            .fold(0.0, f64::max)
    }

    /// Mean of the element centres (a default starting point for zero searches).
    pub fn centroid(&self) -> Vec3 {
        let sum: Vec3 = self.elements.iter().map(Conductor::center).sum();
        sum / self.elements.len() as f64
    }

    /// Lists every broken element invariant. Empty means the assembly is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            e.violations(i, &mut out);
        }
        out
    }

    /// Multiplies every position and length by `s`; currents are unchanged.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(TrapError::InvalidArgument(format!(
                "scale factor must be positive, got {s}"
            )));
        }
        Ok(self.map_elements(|e| e.scaled(s)))
    }

    /// Rigid motion: rotate about the origin, then translate.
    pub fn transformed(&self, rotation: &Rotation3<f64>, translation: &Vec3) -> Self {
        self.map_elements(|e| e.transformed(rotation, translation))
    }

    /// Multiplies every element current by `c`.
    pub fn with_currents_scaled(&self, c: f64) -> Self {
        self.map_elements(|e| e.with_current(e.current() * c))
    }

    /// Assembly carrying the element currents produced by a drive current of
    /// `amperes`. The returned assembly has unit drive scale.
    pub fn with_drive_current(&self, amperes: f64) -> Self {
        let mut a = self.with_currents_scaled(self.drive_scale * amperes);
        a.drive_scale = 1.0;
        a
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..self.clone()
        }
    }

    /// Same conductors with a different drive scale.
    pub fn with_drive_scale_set(&self, drive_scale: f64) -> Self {
        Self {
            drive_scale,
            ..self.clone()
        }
    }

    /// Concatenation of both element lists (self first).
    pub fn union(&self, other: &ConductorAssembly) -> Self {
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&other.elements);
        Self {
            label: format!("{}+{}", self.label, other.label),
            elements,
            drive_scale: self.drive_scale,
        }
    }

    fn map_elements(&self, f: impl Fn(Conductor) -> Conductor) -> Self {
        Self {
            label: self.label.clone(),
            elements: self.elements.iter().copied().map(f).collect(),
            drive_scale: self.drive_scale,
        }
    }
}

/// Two coaxial loops of radius `radius` at `z = ±radius/2`, carrying `+current`
/// (upper) and `-current` (lower). The field zero is at the origin.
pub fn anti_helmholtz(radius: f64, current: f64) -> Result<ConductorAssembly> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(TrapError::InvalidArgument(format!(
            "loop radius must be positive, got {radius}"
        )));
    }
    ConductorAssembly::new(
        "anti-helmholtz",
        vec![
            CircularLoop::coaxial(0.5 * radius, radius, current).into(),
            CircularLoop::coaxial(-0.5 * radius, radius, -current).into(),
        ],
    )
}

/// Parameters of the printed cylinder trap model: four straight conductors
/// parallel to z with alternating currents, closed off by two
/// counter-propagating loops in the planes `z = ±plane_separation/2`.
///
/// The straight conductors sit on the corners of a square of side
/// `wire_separation` centred on the z axis; with alternating currents the
/// principal axes of the trap are then x, y and z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderTrapParams {
    pub wire_separation: f64,
    pub loop_radius: f64,
    pub plane_separation: f64,
    pub current: f64,
}

impl Default for CylinderTrapParams {
    /// 5 mm conductor spacing and plane gap. The loop radius balances the
    /// transverse and axial quadrupoles to the ideal -2:1:1 eigenvalue ratio.
    fn default() -> Self {
        Self {
            wire_separation: 5e-3,
            loop_radius: DEFAULT_CYLINDER_LOOP_RADIUS,
            plane_separation: 5e-3,
            current: 1.0,
        }
    }
}

/// Loop radius (m) that gives an ideal -2:1:1 trap for the default spacings.
/// See `trap::balanced_loop_radius`.
pub const DEFAULT_CYLINDER_LOOP_RADIUS: f64 = 5.69e-3;

impl CylinderTrapParams {
    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("wire_separation", self.wire_separation),
            ("loop_radius", self.loop_radius),
            ("plane_separation", self.plane_separation),
        ];
        for (name, v) in lengths {
            if !(v > 0.0) || !v.is_finite() {
                return Err(TrapError::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.current.is_finite() {
            return Err(TrapError::InvalidArgument("current must be finite".into()));
        }
        Ok(())
    }

    /// Edge of the cubic region enclosed by the conductors.
    pub fn trapping_region_edge(&self) -> f64 {
        self.wire_separation.min(self.plane_separation)
    }

    /// Distance of each straight conductor from the trap axis.
    pub fn wire_offset(&self) -> f64 {
        self.wire_separation / std::f64::consts::SQRT_2
    }
}

/// Builds the cylinder trap: elements 0-3 are the straight conductors at the
/// square corners (+,+), (-,+), (-,-), (+,-) with currents +I, -I, +I, -I
/// along +z, element 4 is the upper
/// loop (+I) and element 5 the lower loop (-I). The field zero is the origin.
pub fn cylinder_trap(p: &CylinderTrapParams) -> Result<ConductorAssembly> {
    p.validate()?;
    let c = 0.5 * p.wire_separation;
    let h = 0.5 * p.plane_separation;
    let i = p.current;
    let wire = |x: f64, y: f64, current: f64| -> Conductor {
        StraightSegment::new(Vec3::new(x, y, -h), Vec3::new(x, y, h), current).into()
    };
    ConductorAssembly::new(
        "cylinder-trap",
        vec![
            wire(c, c, i),
            wire(-c, c, -i),
            wire(-c, -c, i),
            wire(c, -c, -i),
            CircularLoop::coaxial(h, p.loop_radius, i).into(),
            CircularLoop::coaxial(-h, p.loop_radius, -i).into(),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_loop() -> ConductorAssembly {
        ConductorAssembly::new("loop", vec![CircularLoop::coaxial(0.0, 1.0, 1.0).into()]).unwrap()
    }

    #[test]
    fn valid_loop_has_no_violations() {
        assert!(unit_loop().validate().is_empty());
    }

    #[test]
    fn zero_radius_reported() {
        let a = ConductorAssembly::new("bad", vec![CircularLoop::coaxial(0.0, 0.0, 1.0).into()])
            .unwrap();
        assert_eq!(
            a.validate(),
            vec![Violation {
                element: 0,
                rule: "radius > 0"
            }]
        );
    }

    #[test]
    fn degenerate_segment_reported() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let a = ConductorAssembly::new(
            "bad",
            vec![
                CircularLoop::coaxial(0.0, 1.0, 1.0).into(),
                StraightSegment::new(p, p, 1.0).into(),
            ],
        )
        .unwrap();
        let v = a.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].element, 1);
        assert_eq!(v[0].rule, "degenerate segment");
        assert_eq!(v[0].to_string(), "element 1: degenerate segment");
    }

    #[test]
    fn zero_axis_reported() {
        let l = CircularLoop::new(Vec3::zeros(), Vec3::zeros(), 1.0, 1.0);
        let a = ConductorAssembly::new("bad", vec![l.into()]).unwrap();
        assert_eq!(a.validate()[0].rule, "unit axis");
    }

    #[test]
    fn empty_assembly_rejected() {
        assert!(ConductorAssembly::new("empty", vec![]).is_err());
    }

    #[test]
    fn unit_scale_is_identity() {
        let a = cylinder_trap(&CylinderTrapParams::default()).unwrap();
        assert_eq!(a.scaled(1.0).unwrap(), a);
    }

    #[test]
    fn halving_scale() {
        let a = unit_loop().scaled(0.5).unwrap();
        match a.elements()[0] {
            Conductor::Loop(l) => {
                assert_eq!(l.radius, 0.5);
                assert_eq!(l.current, 1.0);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn non_positive_scale_rejected() {
        assert!(unit_loop().scaled(0.0).is_err());
        assert!(unit_loop().scaled(-2.0).is_err());
    }

    #[test]
    fn anti_helmholtz_layout() {
        let a = anti_helmholtz(1.0, 1.0).unwrap();
        let loops: Vec<_> = a
            .elements()
            .iter()
            .map(|e| match e {
                Conductor::Loop(l) => (l.center.z, l.current),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(loops, vec![(0.5, 1.0), (-0.5, -1.0)]);
        assert!(anti_helmholtz(0.0, 1.0).is_err());
        assert!(anti_helmholtz(-1.0, 1.0).is_err());
    }

    #[test]
    fn cylinder_topology() {
        let p = CylinderTrapParams::default();
        let a = cylinder_trap(&p).unwrap();
        let segments = a
            .elements()
            .iter()
            .filter(|e| matches!(e, Conductor::Segment(_)))
            .count();
        assert_eq!(a.elements().len(), 6);
        assert_eq!(segments, 4);
        assert!((p.trapping_region_edge() - 5e-3).abs() < 1e-15);
        assert!(a.validate().is_empty());
        let bad = CylinderTrapParams {
            loop_radius: 0.0,
            ..p
        };
        assert!(cylinder_trap(&bad).is_err());
    }

    #[test]
    fn drive_current_scales_elements() {
        let a = anti_helmholtz(1.0, 1.0)
            .unwrap()
            .with_drive_scale_set(0.5)
            .with_drive_current(4.0);
        assert_eq!(a.elements()[0].current(), 2.0);
        assert_eq!(a.drive_scale(), 1.0);
    }

    proptest! {
        #[test]
        fn scale_composition(s1 in 0.01f64..100.0, s2 in 0.01f64..100.0) {
            let a = cylinder_trap(&CylinderTrapParams::default()).unwrap();
            let twice = a.scaled(s1).unwrap().scaled(s2).unwrap();
            let once = a.scaled(s1 * s2).unwrap();
            for (x, y) in twice.elements().iter().zip(once.elements()) {
                match (x, y) {
                    (Conductor::Loop(p), Conductor::Loop(q)) => {
                        prop_assert!((p.radius - q.radius).abs() <= 4.0 * f64::EPSILON * q.radius);
                        prop_assert!((p.center - q.center).norm() <= 4.0 * f64::EPSILON * q.center.norm());
                        prop_assert_eq!(p.current, q.current);
                    }
                    (Conductor::Segment(p), Conductor::Segment(q)) => {
                        prop_assert!((p.start - q.start).norm() <= 4.0 * f64::EPSILON * q.start.norm());
                        prop_assert!((p.end - q.end).norm() <= 4.0 * f64::EPSILON * q.end.norm());
                    }
                    _ => prop_assert!(false, "element kinds differ"),
                }
            }
        }

        #[test]
        fn power_of_two_scales_compose_exactly(e1 in -8i32..8, e2 in -8i32..8) {
            let a = cylinder_trap(&CylinderTrapParams::default()).unwrap();
            let (s1, s2) = (2f64.powi(e1), 2f64.powi(e2));
            prop_assert_eq!(a.scaled(s1).unwrap().scaled(s2).unwrap(), a.scaled(s1 * s2).unwrap());
        }

        #[test]
        fn builders_validate(r in 1e-4f64..10.0, i in -100.0f64..100.0) {
            prop_assert!(anti_helmholtz(r, i).unwrap().validate().is_empty());
        }
    }
}
