//! Transit-aware agent-based epidemic simulation.
//!
//! The crate builds a synthetic town's daily contact network from two
//! sources, co-location at places (homes, workplaces, schools, other
//! venues) and co-riding on scheduled public transit, and runs a
//! chain-binomial SEIR process over it. Interventions (reducing the rider
//! pool, changing the transit exposure threshold, closing schools) are
//! expressed as scenario grids. A separate analytics module evaluates the
//! moment-based transmissibility threshold of a degree decomposition and
//! checks it against a bond-percolation Monte Carlo oracle.
//!
//! Module map:
//!
//! * [`ingest`]: activity schedules, GTFS feeds, synthetic generators
//! * [`transit`]: itinerary planning, rider selection, vehicle co-presence
//! * [`network`]: contact events, contact graph, degree decomposition
//! * [`engine`]: infection probabilities and the daily SEIR step
//! * [`scenario`]: interventions, beta calibration, scenario grids
//! * [`threshold`]: threshold analytics and the percolation oracle
//! * [`report`]: delimited-text writers and readers for every output

pub mod engine;
pub mod ingest;
pub mod network;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod threshold;
pub mod transit;

pub use engine::{
    contact_rate, infection_force, pair_infection_prob, run_epidemic, DailyCounts, DiseaseParams, EngineError,
    EpidemicState, Health, Simulator,
};
pub use ingest::{
    generate_grid_feed, generate_synthetic_population, parse_activity_file, parse_gtfs_feed, ActivityRecord,
    ActivitySchema, Coord, IngestError, LocationId, LocationKind, PersonId, PopulationDataset, ServiceTime,
    TransitFeed, VehicleRun,
};
pub use network::{
    build_contacts, degree_decompose, degree_moments, ContactEvent, ContactGraph, ContactKind, DegreeDecomposition,
    DegreeMoments, NetworkError,
};
pub use scenario::{
    apply_school_closure, calibrate_beta, run_scenario_grid, CalibrationResult, ScenarioConfig, ScenarioError,
};
pub use threshold::{
    compute_w_mu, effective_moments, outbreak_size, percolation_oracle, transmissibility_threshold,
    InterventionAlpha, ThresholdError, ThresholdReport,
};
pub use transit::{assign_rider_itineraries, compute_copresence, plan_itinerary, TransitItinerary};
