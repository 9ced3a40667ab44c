//! The JSON instance format: one file per problem, with a mode
//! discriminator selecting which section is read.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{BalanceError, CountVector};
use crate::homebuilding::{Catalog, HomeError, RequirementTable, TeamSchedule};
use crate::improve::{CorrectionGroup, ImproveConfig, ImproveError};
use crate::jit::{JitError, PenaltyWeights, WindowInstance, WindowJob};
use crate::model::{
    join_violations, validate_instance, ElementUniverse, Instance, JobSpec, ModelError,
    SlotSchedule, TimeGrid, Violation,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{pointer}: {message} (line {line}, column {column})")]
    Parse {
        /// JSON pointer to the offending value, `""` for the document root.
        pointer: String,
        message: String,
        line: usize,
        column: usize,
    },
    #[error("invalid instance: {}", join_violations(.0))]
    Schema(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Home(#[from] HomeError),
    #[error(transparent)]
    Jit(#[from] JitError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Improve(#[from] ImproveError),
}

impl IoError {
    /// I/O failures are told apart from bad input by the CLI exit code.
    pub fn is_io(&self) -> bool {
        matches!(self, IoError::Io { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Modular,
    Homebuilding,
    Windows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModularSection {
    pub universe: Vec<String>,
    pub idle: String,
    pub jobs: Vec<JobSpec>,
    pub schedule: SlotSchedule,
    pub grid: TimeGrid,
    /// Reference counts per universe type.
    pub reference: Vec<f64>,
    pub threshold: f64,
}

/// First month of the horizon, for labels only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calendar {
    pub year: i32,
    pub month: u32,
}

impl Calendar {
    /// Label of 1-based `month`, `m/yyyy`.
    pub fn label(&self, month: usize) -> String {
        let zero = (self.month as i64 - 1) + month as i64 - 1;
        format!(
            "{}/{}",
            zero.rem_euclid(12) + 1,
            self.year as i64 + zero.div_euclid(12)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomebuildingSection {
    pub catalog: Catalog,
    pub schedule: TeamSchedule,
    pub horizon_months: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calendar: Option<Calendar>,
    /// Monthly production capacity per detail type.
    pub capacity: Vec<f64>,
    /// Published monthly requirements to compare against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_requirements: Option<Vec<Vec<f64>>>,
    /// Hand-specified correction groups, used instead of generated ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction_groups: Option<Vec<CorrectionGroup>>,
    #[serde(default)]
    pub improve: ImproveConfig,
}

impl HomebuildingSection {
    pub fn capacity_vector(&self) -> Result<CountVector, BalanceError> {
        CountVector::new(self.capacity.clone())
    }

    pub fn reference_table(&self) -> Option<RequirementTable> {
        self.reference_requirements
            .as_ref()
            .map(|rows| RequirementTable {
                detail_types: self.catalog.detail_types.clone(),
                rows: rows.clone(),
            })
    }

    pub fn month_label(&self, month: usize) -> String {
        match self.calendar {
            Some(c) => c.label(month),
            None => month.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowsSection {
    pub jobs: Vec<WindowJob>,
    #[serde(default)]
    pub weights: PenaltyWeights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modular: Option<ModularSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homebuilding: Option<HomebuildingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<WindowsSection>,
}

/// An instance whose active section passed every structural check.
#[derive(Debug, Clone)]
pub enum Loaded<'a> {
    Modular {
        instance: Instance,
        reference: CountVector,
        threshold: f64,
    },
    Homebuilding(&'a HomebuildingSection),
    Windows {
        instance: WindowInstance,
        weights: PenaltyWeights,
    },
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            let inner = e.into_inner();
            IoError::Parse {
                pointer,
                message: strip_position(&inner.to_string()),
                line: inner.line(),
                column: inner.column(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    /// Checks the format version, that exactly the section named by `mode`
    /// is present, and the section's own invariants.
    pub fn validate(&self) -> Result<Loaded<'_>, IoError> {
        let mut v = Vec::new();
        if self.format_version != FORMAT_VERSION {
            v.push(Violation::new(
                "/format_version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    self.format_version
                ),
            ));
        }
        let present = [
            (Mode::Modular, self.modular.is_some(), "/modular"),
            (
                Mode::Homebuilding,
                self.homebuilding.is_some(),
                "/homebuilding",
            ),
            (Mode::Windows, self.windows.is_some(), "/windows"),
        ];
        for (mode, is_present, pointer) in present {
            if mode == self.mode && !is_present {
                v.push(Violation::new(
                    pointer,
                    "section required by mode is missing",
                ));
            }
            if mode != self.mode && is_present {
                v.push(Violation::new(pointer, "section does not match mode"));
            }
        }
        if !v.is_empty() {
            return Err(IoError::Schema(v));
        }

        match self.mode {
            Mode::Modular => {
                let m = self.modular.as_ref().expect("checked");
                let universe = ElementUniverse::new(m.universe.clone(), &m.idle)?;
                let instance = validate_instance(universe, &m.jobs, m.schedule.clone(), m.grid)?;
                let reference = CountVector::new(m.reference.clone())?;
                if reference.len() != instance.universe.len() {
                    return Err(IoError::Schema(vec![Violation::new(
                        "/modular/reference",
                        format!("needs {} entries", instance.universe.len()),
                    )]));
                }
                Ok(Loaded::Modular {
                    instance,
                    reference,
                    threshold: m.threshold,
                })
            }
            Mode::Homebuilding => {
                let h = self.homebuilding.as_ref().expect("checked");
                h.catalog.validate()?;
                h.schedule
                    .validate(&h.catalog, Some(h.horizon_months as f64))?;
                let details = h.catalog.detail_types.len();
                if h.capacity.len() != details {
                    v.push(Violation::new(
                        "/homebuilding/capacity",
                        format!("needs {details} entries"),
                    ));
                }
                h.capacity_vector()?;
                if let Some(rows) = &h.reference_requirements {
                    if rows.len() != h.horizon_months || rows.iter().any(|r| r.len() != details) {
                        v.push(Violation::new(
                            "/homebuilding/reference_requirements",
                            format!("must be {} x {details}", h.horizon_months),
                        ));
                    }
                }
                if !v.is_empty() {
                    return Err(IoError::Schema(v));
                }
                Ok(Loaded::Homebuilding(h))
            }
            Mode::Windows => {
                let w = self.windows.as_ref().expect("checked");
                let weights = PenaltyWeights::new(w.weights.earliness, w.weights.tardiness)?;
                Ok(Loaded::Windows {
                    instance: WindowInstance::new(w.jobs.clone())?,
                    weights,
                })
            }
        }
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<InstanceFile, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    InstanceFile::from_json(&text)
}

pub fn save_instance(instance: &InstanceFile, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, instance.to_json()).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// serde_json appends " at line L column C"; the error carries those apart.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}
