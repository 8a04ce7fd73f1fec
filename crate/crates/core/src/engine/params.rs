use super::EngineError;

/// Transmission and natural-history parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiseaseParams {
    /// Per-contact infection rate.
    pub beta: f64,
    /// Contact rate at places.
    pub c_place: f64,
    /// Factor applied to `c_place` aboard transit vehicles.
    pub transit_multiplier: f64,
    /// Transit exposure (minutes) at which the per-pair probability
    /// saturates. `f64::INFINITY` disables transit transmission.
    pub h_threshold_minutes: f64,
    pub latent_days: u32,
    pub infectious_days: u32,
    /// Place exposure (minutes) at which the per-pair probability saturates.
    pub saturation_minutes_place: f64,
}

impl Default for DiseaseParams {
    fn default() -> Self {
        DiseaseParams {
            beta: 0.05,
            c_place: 1.0,
            transit_multiplier: 1.5,
            h_threshold_minutes: 30.0,
            latent_days: 1,
            infectious_days: 4,
            saturation_minutes_place: 480.0,
        }
    }
}

impl DiseaseParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |what: String| Err(EngineError::InvalidParams(what));
        if !(0.0..=1.0).contains(&self.beta) {
            return bad(format!("beta = {} outside [0, 1]", self.beta));
        }
        if !(self.c_place >= 0.0 && self.c_place.is_finite()) {
            return bad(format!("c_place = {}", self.c_place));
        }
        if !(self.transit_multiplier >= 0.0 && self.transit_multiplier.is_finite()) {
            return bad(format!("transit_multiplier = {}", self.transit_multiplier));
        }
        if !(self.h_threshold_minutes > 0.0) {
            return bad(format!("h_threshold_minutes = {}", self.h_threshold_minutes));
        }
        if !(self.saturation_minutes_place > 0.0 && self.saturation_minutes_place.is_finite()) {
            return bad(format!("saturation_minutes_place = {}", self.saturation_minutes_place));
        }
        if self.infectious_days == 0 {
            return bad("infectious_days must be at least 1".into());
        }
        Ok(())
    }
}
