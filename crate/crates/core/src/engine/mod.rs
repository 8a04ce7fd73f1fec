//! Chain-binomial SEIR dynamics on the contact graph.

mod params;
mod sim;
mod transmission;

pub use params::DiseaseParams;
pub use sim::{
    run_epidemic, seed_initial, step_day, DailyCounts, DayOutcome, EpidemicState, Health, Simulator, Transmission,
};
pub use transmission::{contact_rate, infection_force, pair_infection_prob};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid disease parameters: {0}")]
    InvalidParams(String),
    #[error("simulation horizon must be at least one day")]
    InvalidHorizon,
    #[error("cannot seed {requested} infections in a population of {population}")]
    TooManyInitial { requested: usize, population: usize },
}
