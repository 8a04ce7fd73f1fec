//! Public transit: itinerary planning on a GTFS feed, rider selection under
//! ridership reductions, and co-presence aboard vehicles.

mod copresence;
mod planner;
mod riders;

pub use copresence::compute_copresence;
pub use planner::{plan_itinerary, Planner, PlannerConfig, TransitItinerary, TransitLeg};
pub use riders::{assign_rider_itineraries, rider_count, riding_minutes, RiderPool};
