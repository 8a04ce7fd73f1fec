//! Intervention scenarios: school closure, beta calibration against a
//! target R0, scenario files and grids over rider reduction, transit
//! exposure threshold, R0 and closure.

mod calibrate;
mod closure;
mod config;
mod grid;

pub use calibrate::{calibrate_beta, estimate_r0, CalibrationOptions, CalibrationResult};
pub use closure::apply_school_closure;
pub use config::{
    parse_h_minutes, DataSource, GridSpec, ScenarioConfig, ScenarioFile, Transmission, DEFAULT_SYNTHETIC_LOCATIONS,
    DEFAULT_SYNTHETIC_PERSONS,
};
pub use grid::{run_scenario_grid, CellKey, CellResult, GridResult, MeanCounts, ReplicateRun, ScenarioRunner};

use crate::engine::EngineError;
use crate::ingest::{
    generate_grid_feed, generate_synthetic_population, parse_activity_file, parse_gtfs_feed, ActivitySchema,
    GridFeedConfig, IngestError, PopulationDataset, TransitFeed,
};
use crate::network::NetworkError;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("empty grid axis: {0}")]
    EmptyGrid(&'static str),
    #[error("r0 target {0} must be positive")]
    InvalidTarget(f64),
    #[error("r0 target {target} unreachable: beta = 1 gives {max_r0}")]
    Unreachable { target: f64, max_r0: f64 },
    #[error("calibration to r0 {target} did not converge; closest beta {best_beta} gives {best_r0}")]
    NotConverged { target: f64, best_beta: f64, best_r0: f64 },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Loads or generates the population and feed of a scenario file. The
/// seed drives synthetic generation and transit eligibility.
pub fn load_data(source: &DataSource, seed: u64) -> Result<(PopulationDataset, TransitFeed), ScenarioError> {
    match source {
        DataSource::Synthetic { persons, locations } => {
            let feed = generate_grid_feed(&GridFeedConfig::default());
            let dataset = generate_synthetic_population(*persons, *locations, &feed, seed)?;
            Ok((dataset, feed))
        }
        DataSource::Files { activities, gtfs } => {
            let feed = parse_gtfs_feed(gtfs)?;
            let schema = ActivitySchema { eligibility_seed: seed, ..ActivitySchema::default() };
            let dataset = parse_activity_file(activities, &schema)?;
            Ok((dataset, feed))
        }
    }
}
