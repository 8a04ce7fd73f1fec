//! Moment-based transmissibility threshold under a transit intervention,
//! and a bond-percolation Monte Carlo oracle to check it against.
//!
//! With `k_alpha = alpha * k_bus + k_nonbus` the intervened degree of each
//! person (`alpha` the share of transit degree left):
//!
//! * `w = <k_alpha> / <k> = (alpha * mu + 1) / (mu + 1)`, `mu = <k_bus> / <k_nonbus>`
//! * `v = <k_alpha^2> / <k^2>`
//! * `<s> = 1 + T w <k> / (1 - T (v <k^2> - w <k>) / (w <k>))`
//! * `1 / T_c = <k_alpha^2> / <k_alpha> - 1`

mod analytics;
mod oracle;

pub use analytics::{
    compute_w_mu, effective_moments, outbreak_size, threshold_report, transmissibility_threshold, InterventionAlpha,
    OutbreakSize, Threshold, ThresholdReport,
};
pub use oracle::{giant_emergence, percolation_oracle, OracleEstimate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThresholdError {
    #[error("empty population")]
    EmptyPopulation,
    #[error("alpha = {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("transmissibility = {0} outside [0, 1]")]
    InvalidTransmissibility(f64),
    #[error("mean non-transit degree is zero")]
    ZeroNonBusDegree,
    #[error("mean degree is zero")]
    ZeroMeanDegree,
    #[error("<k_alpha^2> <= <k_alpha>: no giant component at any transmissibility")]
    DegenerateDegrees,
    #[error("mu = {mu} but (1 - w) / (w - alpha) = {identity}")]
    IdentityViolated { mu: f64, identity: f64 },
    #[error("at least one oracle sample is required")]
    NoSamples,
}
