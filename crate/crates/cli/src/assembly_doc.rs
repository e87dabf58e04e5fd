//! JSON assembly documents. Lengths are always metres in the file.

use quadtrap::{CircularLoop, Conductor, ConductorAssembly, StraightSegment, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssemblyDoc {
    #[serde(default = "default_label")]
    pub label: String,
    pub elements: Vec<ElementDoc>,
    #[serde(default = "default_drive_scale")]
    pub drive_scale: f64,
}

fn default_label() -> String {
    "assembly".into()
}

fn default_drive_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ElementDoc {
    Loop {
        center: [f64; 3],
        axis: [f64; 3],
        radius: f64,
        current: f64,
    },
    Segment {
        start: [f64; 3],
        end: [f64; 3],
        current: f64,
    },
}

fn vec3(v: [f64; 3]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// Parses a document, reporting syntax errors with line and column.
pub fn parse(text: &str, source: &str) -> CliResult<AssemblyDoc> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "{source}: line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

impl AssemblyDoc {
    /// Builds the assembly and rejects any broken element invariant.
    pub fn to_assembly(&self) -> CliResult<ConductorAssembly> {
        let elements = self
            .elements
            .iter()
            .map(|e| match *e {
                ElementDoc::Loop {
                    center,
                    axis,
                    radius,
                    current,
                } => CircularLoop::new(vec3(center), vec3(axis), radius, current).into(),
                ElementDoc::Segment {
                    start,
                    end,
                    current,
                } => StraightSegment::new(vec3(start), vec3(end), current).into(),
            })
            .collect();
        let a =
            ConductorAssembly::with_drive_scale(self.label.clone(), elements, self.drive_scale)?;
        let violations = a.validate();
        if !violations.is_empty() {
            let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(CliError::Input(format!(
                "invalid assembly: {}",
                list.join("; ")
            )));
        }
        Ok(a)
    }

    pub fn from_assembly(a: &ConductorAssembly) -> Self {
        Self {
            label: a.label().to_string(),
            elements: a
                .elements()
                .iter()
                .map(|e| match e {
                    Conductor::Loop(l) => ElementDoc::Loop {
                        center: arr(&l.center),
                        axis: arr(&l.axis),
                        radius: l.radius,
                        current: l.current,
                    },
                    Conductor::Segment(s) => ElementDoc::Segment {
                        start: arr(&s.start),
                        end: arr(&s.end),
                        current: s.current,
                    },
                })
                .collect(),
            drive_scale: a.drive_scale(),
        }
    }
}
