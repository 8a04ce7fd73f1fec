use std::fmt;

use transit_epi_core::report::ReportError;
use transit_epi_core::scenario::ScenarioError;
use transit_epi_core::{EngineError, IngestError, NetworkError, ThresholdError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Config,
    Data,
    Runtime,
}

impl Class {
    pub fn exit_code(self) -> i32 {
        match self {
            Class::Config => 2,
            Class::Data => 3,
            Class::Runtime => 4,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Class::Config => "config",
            Class::Data => "data",
            Class::Runtime => "runtime",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: Class,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(class: Class, kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { class, kind: kind.into(), message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new(Class::Config, "Config", message)
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::new(Class::Runtime, "Io", format!("{}: {err}", path.display()))
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.class.as_str(),
            "kind": self.kind,
            "message": self.message,
            "exit_code": self.class.exit_code(),
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error ({}): {}", self.class.as_str(), self.kind, self.message)
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        let class = match e {
            IngestError::InvalidScale(_) => Class::Config,
            _ => Class::Data,
        };
        CliError::new(class, e.kind(), e.to_string())
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        CliError::new(Class::Data, "Network", e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::new(Class::Runtime, "Engine", e.to_string())
    }
}

impl From<ThresholdError> for CliError {
    fn from(e: ThresholdError) -> Self {
        let (class, kind) = match e {
            ThresholdError::InvalidAlpha(_) => (Class::Config, "InvalidAlpha"),
            ThresholdError::InvalidTransmissibility(_) => (Class::Config, "InvalidTransmissibility"),
            ThresholdError::NoSamples => (Class::Config, "NoSamples"),
            ThresholdError::EmptyPopulation => (Class::Data, "EmptyPopulation"),
            ThresholdError::ZeroNonBusDegree => (Class::Runtime, "ZeroNonBusDegree"),
            ThresholdError::ZeroMeanDegree => (Class::Runtime, "ZeroMeanDegree"),
            ThresholdError::DegenerateDegrees => (Class::Runtime, "DegenerateDegrees"),
            ThresholdError::IdentityViolated { .. } => (Class::Runtime, "IdentityViolated"),
        };
        CliError::new(class, kind, e.to_string())
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        let class = match e {
            ReportError::Io(_) => Class::Runtime,
            _ => Class::Data,
        };
        CliError::new(class, "Report", e.to_string())
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Ingest(e) => e.into(),
            ScenarioError::Network(e) => e.into(),
            ScenarioError::Engine(e) => e.into(),
            ScenarioError::Config(_) | ScenarioError::EmptyGrid(_) | ScenarioError::InvalidTarget(_) => {
                CliError::new(Class::Config, "Config", e.to_string())
            }
            ScenarioError::Unreachable { .. } => CliError::new(Class::Runtime, "Unreachable", e.to_string()),
            ScenarioError::NotConverged { .. } => CliError::new(Class::Runtime, "NotConverged", e.to_string()),
        }
    }
}
