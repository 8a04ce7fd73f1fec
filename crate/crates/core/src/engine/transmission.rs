use super::DiseaseParams;
use crate::network::ContactKind;

/// Contact rate for a venue kind: `transit_multiplier * c_place` aboard
/// transit, `c_place` elsewhere.
pub fn contact_rate(kind: ContactKind, params: &DiseaseParams) -> f64 {
    if kind.is_transit() {
        params.transit_multiplier * params.c_place
    } else {
        params.c_place
    }
}

/// Daily infection probability along one contact of `overlap_minutes`:
/// `beta * c * min(t / H, 1)` clamped to `[0, 1]`, with `H` the transit
/// threshold aboard vehicles and the place saturation time elsewhere. An
/// infinite threshold contributes nothing.
pub fn pair_infection_prob(overlap_minutes: f64, kind: ContactKind, params: &DiseaseParams) -> f64 {
    let horizon = if kind.is_transit() {
        params.h_threshold_minutes
    } else {
        params.saturation_minutes_place
    };
    let exposure = if horizon.is_infinite() {
        0.0
    } else {
        (overlap_minutes / horizon).min(1.0)
    };
    (params.beta * contact_rate(kind, params) * exposure).clamp(0.0, 1.0)
}

/// Probability that at least one of several independent exposures
/// transmits: `1 - prod(1 - tau)`.
pub fn infection_force(taus: &[f64]) -> f64 {
    1.0 - taus.iter().fold(1.0, |escape, &tau| escape * (1.0 - tau))
}
