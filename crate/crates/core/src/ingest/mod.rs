//! Input datasets: resident activity schedules and GTFS transit schedules.

mod activity;
mod gtfs;
mod synthetic;
mod types;

pub use activity::{
    parse_activity_file, parse_activity_str, write_activities, ActivitySchema, MINUTES_PER_DAY,
};
pub use gtfs::{parse_gtfs_feed, parse_gtfs_tables, write_gtfs_feed, GtfsTables};
pub use synthetic::{
    generate_grid_feed, generate_synthetic_population, generate_synthetic_population_with,
    GridFeedConfig, SyntheticConfig,
};
pub use types::{
    ActivityRecord, Coord, GtfsStop, Location, LocationId, LocationKind, PersonId,
    PopulationDataset, ServiceTime, StopIdx, StopTime, TransitFeed, VehicleRun,
};

use std::path::PathBuf;

/// Reference categories used by [`IngestError::DanglingReference`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefKind {
    Stop,
    Route,
    Trip,
    Location,
}

impl std::fmt::Display for RefKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RefKind::Stop => "stop",
            RefKind::Route => "route",
            RefKind::Trip => "trip",
            RefKind::Location => "location",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("{file}: missing column {column}")]
    MissingColumn { file: String, column: String },
    #[error("{file}:{line}: {reason}")]
    MalformedRow {
        file: String,
        line: u64,
        reason: String,
    },
    #[error("overlapping activities for person {0}")]
    OverlappingActivities(String),
    #[error("person {0} has no home activity")]
    MissingHome(String),
    #[error("{file}:{line}: dangling {kind} reference {id:?}")]
    DanglingReference {
        file: String,
        line: u64,
        kind: RefKind,
        id: String,
    },
    #[error("{file}:{line}: duplicate {kind} id {id:?}")]
    DuplicateId {
        file: String,
        line: u64,
        kind: RefKind,
        id: String,
    },
    #[error("trip {0}: stop times are not strictly increasing")]
    NonMonotonicTimes(String),
    #[error("trip {0}: fewer than two stop times")]
    ShortTrip(String),
    #[error("invalid scale: {0}")]
    InvalidScale(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

impl IngestError {
    /// Short machine-readable error class name.
    pub fn kind(&self) -> &'static str {
        match self {
            IngestError::Io { .. } => "Io",
            IngestError::MissingFile(_) => "MissingFile",
            IngestError::MissingColumn { .. } => "MissingColumn",
            IngestError::MalformedRow { .. } => "MalformedRow",
            IngestError::OverlappingActivities(_) => "OverlappingActivities",
            IngestError::MissingHome(_) => "MissingHome",
            IngestError::DanglingReference { .. } => "DanglingReference",
            IngestError::DuplicateId { .. } => "DuplicateId",
            IngestError::NonMonotonicTimes(_) => "NonMonotonicTimes",
            IngestError::ShortTrip(_) => "ShortTrip",
            IngestError::InvalidScale(_) => "InvalidScale",
            IngestError::InvalidDataset(_) => "InvalidDataset",
        }
    }

    /// Where in the input the problem lies: `file:line`, a file, a person
    /// or a trip. `None` for errors not tied to an input position.
    pub fn location(&self) -> Option<String> {
        match self {
            IngestError::Io { path, .. } => Some(path.display().to_string()),
            IngestError::MissingFile(file) | IngestError::MissingColumn { file, .. } => Some(file.clone()),
            IngestError::MalformedRow { file, line, .. }
            | IngestError::DanglingReference { file, line, .. }
            | IngestError::DuplicateId { file, line, .. } => Some(format!("{file}:{line}")),
            IngestError::OverlappingActivities(p) | IngestError::MissingHome(p) => Some(format!("person {p}")),
            IngestError::NonMonotonicTimes(t) | IngestError::ShortTrip(t) => Some(format!("trip {t}")),
            IngestError::InvalidScale(_) | IngestError::InvalidDataset(_) => None,
        }
    }
}
