use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::planner::{Planner, PlannerConfig, TransitItinerary};
use crate::ingest::{PersonId, PopulationDataset, TransitFeed};
use crate::rng::{self, domain};

/// Number of riders kept when the eligible pool of `eligible` persons is
/// reduced by `reduction`: `ceil((1 - reduction) * eligible)`.
pub fn rider_count(eligible: usize, reduction: f64) -> usize {
    let keep = (1.0 - reduction.clamp(0.0, 1.0)) * eligible as f64;
    // Guard against products such as 0.7 * 10 = 7.000000000000001.
    ((keep - 1e-9).ceil().max(0.0) as usize).min(eligible)
}

/// Transit itineraries for a person's day: one per move between
/// consecutive activities at distinct locations, when a plan exists.
fn plan_day(dataset: &PopulationDataset, planner: &Planner<'_>, person: PersonId) -> Vec<TransitItinerary> {
    let mut out = Vec::new();
    // A person cannot board before their previous ride has ended.
    let mut free_at = 0u32;
    for pair in dataset.activities(person).windows(2) {
        let (from, to) = (&pair[0], &pair[1]);
        if from.location == to.location {
            continue;
        }
        let (Some(origin), Some(dest)) = (dataset.location(from.location).coord, dataset.location(to.location).coord) else {
            continue;
        };
        let leave = from.end().max(free_at.div_ceil(60));
        if let Some(it) = planner.plan(&origin, &dest, leave) {
            free_at = it.legs.last().map_or(free_at, |l| l.alight_time.seconds());
            out.push(it);
        }
    }
    out
}

/// All transit-eligible persons' itineraries together with a fixed, seeded
/// rider order. Reducing ridership keeps a prefix of that order, so rider
/// sets at different reduction levels are nested.
#[derive(Debug, Clone)]
pub struct RiderPool {
    order: Vec<PersonId>,
    itineraries: BTreeMap<PersonId, Vec<TransitItinerary>>,
}

impl RiderPool {
    pub fn new(dataset: &PopulationDataset, feed: &TransitFeed, config: PlannerConfig, seed: u64) -> RiderPool {
        let order = rider_order(dataset, seed);
        let planner = Planner::new(feed, config);
        let itineraries = order
            .par_iter()
            .map(|&p| (p, plan_day(dataset, &planner, p)))
            .collect();
        RiderPool { order, itineraries }
    }

    /// The seeded rider order over the eligible pool.
    pub fn order(&self) -> &[PersonId] {
        &self.order
    }

    pub fn riders(&self, reduction: f64) -> &[PersonId] {
        &self.order[..rider_count(self.order.len(), reduction)]
    }

    pub fn itineraries(&self, reduction: f64) -> BTreeMap<PersonId, Vec<TransitItinerary>> {
        self.riders(reduction)
            .iter()
            .map(|p| (*p, self.itineraries[p].clone()))
            .collect()
    }
}

fn rider_order(dataset: &PopulationDataset, seed: u64) -> Vec<PersonId> {
    let mut order = dataset.transit_eligible().to_vec();
    order.shuffle(&mut rng::stream(seed, domain::RIDERS, 0, 0));
    order
}

/// Selects `ceil((1 - pttcr_reduction) * |eligible|)` riders (a prefix of a
/// seeded permutation of the eligible pool) and plans their trips with the
/// default planner settings. Every selected rider is a key of the result,
/// possibly with no feasible itinerary.
pub fn assign_rider_itineraries(
    dataset: &PopulationDataset,
    feed: &TransitFeed,
    pttcr_reduction: f64,
    seed: u64,
) -> BTreeMap<PersonId, Vec<TransitItinerary>> {
    let order = rider_order(dataset, seed);
    let planner = Planner::new(feed, PlannerConfig::default());
    order[..rider_count(order.len(), pttcr_reduction)]
        .par_iter()
        .map(|&p| (p, plan_day(dataset, &planner, p)))
        .collect()
}

/// Total riding minutes of one person's itineraries.
pub fn riding_minutes(itineraries: &[TransitItinerary]) -> f64 {
    itineraries
        .iter()
        .flat_map(|it| &it.legs)
        .map(|l| f64::from(l.alight_time.seconds() - l.board_time.seconds()) / 60.0)
        .sum()
}
