//! The daily chain-binomial step.
//!
//! On day `d` every susceptible person with at least one infectious
//! neighbor is infected with probability `1 - prod(1 - tau_e)` over all of
//! their contact entries `e` leading to an infectious neighbor (contacts at
//! several venues are pooled into one product). The uniform deciding the
//! outcome comes from the counter-based stream `(seed, person, day)`, so
//! the result does not depend on evaluation order or thread count.
//!
//! After infections, exposed persons whose latent period has elapsed
//! become infectious, and infectious persons whose infectious period has
//! elapsed recover. With `latent_days = 0` a person infected on day `d` is
//! infectious from day `d + 1` on.

use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use super::{pair_infection_prob, DiseaseParams, EngineError};
use crate::ingest::PersonId;
use crate::network::ContactGraph;
use crate::rng::{self, domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Health {
    Susceptible,
    Exposed,
    Infectious,
    Recovered,
}

/// Health of every person plus the day they entered it. Person `p` draws
/// from random stream `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpidemicState {
    pub health: Vec<Health>,
    pub entered_on: Vec<u32>,
}

impl EpidemicState {
    pub fn susceptible(m: usize) -> EpidemicState {
        EpidemicState {
            health: vec![Health::Susceptible; m],
            entered_on: vec![0; m],
        }
    }

    pub fn counts(&self, day: u32, new_infections: usize) -> DailyCounts {
        let mut c = DailyCounts { day, new_infections, ..DailyCounts::default() };
        for h in &self.health {
            match h {
                Health::Susceptible => c.s += 1,
                Health::Exposed => c.e += 1,
                Health::Infectious => c.i += 1,
                Health::Recovered => c.r += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DailyCounts {
    pub day: u32,
    pub s: usize,
    pub e: usize,
    pub i: usize,
    pub r: usize,
    pub new_infections: usize,
}

impl DailyCounts {
    pub fn total(&self) -> usize {
        self.s + self.e + self.i + self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transmission {
    pub infectee: PersonId,
    /// Attributed source; chosen with probability proportional to each
    /// infectious contact's `tau`.
    pub infector: PersonId,
    pub day: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayOutcome {
    pub state: EpidemicState,
    pub counts: DailyCounts,
    pub transmissions: Vec<Transmission>,
}

/// Below this many candidates the step runs serially.
const PARALLEL_THRESHOLD: usize = 512;

/// A contact graph with per-entry transmission probabilities for one
/// parameter set and seed.
#[derive(Debug, Clone)]
pub struct Simulator<'g> {
    graph: &'g ContactGraph,
    params: DiseaseParams,
    taus: Arc<[f64]>,
    seed: u64,
}

impl<'g> Simulator<'g> {
    pub fn new(graph: &'g ContactGraph, params: DiseaseParams, seed: u64) -> Result<Self, EngineError> {
        params.validate()?;
        let taus = graph
            .entries()
            .iter()
            .map(|c| pair_infection_prob(c.minutes, c.kind, &params))
            .collect();
        Ok(Simulator { graph, params, taus, seed })
    }

    /// The same graph and parameters under another seed, sharing the
    /// precomputed probabilities.
    pub fn with_seed(&self, seed: u64) -> Simulator<'g> {
        Simulator { seed, ..self.clone() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn graph(&self) -> &'g ContactGraph {
        self.graph
    }

    pub fn params(&self) -> &DiseaseParams {
        &self.params
    }

    /// Everyone susceptible except `infected`, who start infectious on day 0.
    pub fn initial_state(&self, infected: &[PersonId]) -> EpidemicState {
        let mut state = EpidemicState::susceptible(self.graph.person_count());
        for p in infected {
            state.health[p.index()] = Health::Infectious;
        }
        state
    }

    /// Susceptible persons with at least one infectious contact, ascending.
    fn candidates(&self, state: &EpidemicState) -> Vec<PersonId> {
        let mut out = Vec::new();
        for (p, h) in state.health.iter().enumerate() {
            if *h == Health::Infectious {
                out.extend(
                    self.graph
                        .neighbors(PersonId(p as u32))
                        .iter()
                        .map(|c| c.neighbor)
                        .filter(|n| state.health[n.index()] == Health::Susceptible),
                );
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Decides whether `p` is infected on `day`; returns the attributed
    /// infector if so.
    fn exposure(&self, state: &EpidemicState, p: PersonId, day: u32) -> Option<PersonId> {
        let start = self.graph.offset(p);
        let entries = self.graph.neighbors(p);
        let mut escape = 1.0;
        let mut total = 0.0;
        for (k, c) in entries.iter().enumerate() {
            if state.health[c.neighbor.index()] == Health::Infectious {
                let tau = self.taus[start + k];
                escape *= 1.0 - tau;
                total += tau;
            }
        }
        let force = 1.0 - escape;
        if force <= 0.0 {
            return None;
        }
        let mut rng = rng::stream(self.seed, domain::INFECTION, u64::from(p.0), u64::from(day));
        if rng.random::<f64>() >= force {
            return None;
        }
        let pick = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = None;
        for (k, c) in entries.iter().enumerate() {
            if state.health[c.neighbor.index()] == Health::Infectious && self.taus[start + k] > 0.0 {
                acc += self.taus[start + k];
                last = Some(c.neighbor);
                if pick < acc {
                    return last;
                }
            }
        }
        last
    }

    /// Advances `state` (describing the end of day `day - 1`) by one day.
    pub fn step(&self, state: &EpidemicState, day: u32) -> DayOutcome {
        let candidates = self.candidates(state);
        let decide = |&p: &PersonId| self.exposure(state, p, day).map(|src| Transmission { infectee: p, infector: src, day });
        let transmissions: Vec<Transmission> = if candidates.len() >= PARALLEL_THRESHOLD {
            candidates.par_iter().filter_map(decide).collect()
        } else {
            candidates.iter().filter_map(decide).collect()
        };

        let mut next = state.clone();
        for (p, h) in state.health.iter().enumerate() {
            let age = day.saturating_sub(state.entered_on[p]);
            match h {
                Health::Exposed if age >= self.params.latent_days => {
                    next.health[p] = Health::Infectious;
                    next.entered_on[p] = day;
                }
                Health::Infectious if age >= self.params.infectious_days => {
                    next.health[p] = Health::Recovered;
                    next.entered_on[p] = day;
                }
                _ => {}
            }
        }
        for t in &transmissions {
            let p = t.infectee.index();
            next.health[p] = if self.params.latent_days == 0 { Health::Infectious } else { Health::Exposed };
            next.entered_on[p] = day;
        }
        let counts = next.counts(day, transmissions.len());
        DayOutcome { state: next, counts, transmissions }
    }

    /// Seeds `initial` and runs days `1..=days`; the result holds day 0
    /// through day `days`.
    pub fn run(&self, initial: &[PersonId], days: u32) -> Result<Vec<DailyCounts>, EngineError> {
        if days == 0 {
            return Err(EngineError::InvalidHorizon);
        }
        let mut state = self.initial_state(initial);
        let mut series = Vec::with_capacity(days as usize + 1);
        series.push(state.counts(0, 0));
        for day in 1..=days {
            let out = self.step(&state, day);
            series.push(out.counts);
            state = out.state;
        }
        Ok(series)
    }
}

/// One day of the process with a freshly built simulator.
pub fn step_day(
    state: &EpidemicState,
    graph: &ContactGraph,
    params: &DiseaseParams,
    day: u32,
    seed: u64,
) -> Result<(EpidemicState, DailyCounts), EngineError> {
    let out = Simulator::new(graph, *params, seed)?.step(state, day);
    Ok((out.state, out.counts))
}

/// Draws `count` distinct initial infections uniformly, reproducibly.
pub fn seed_initial(m: usize, count: usize, seed: u64) -> Result<Vec<PersonId>, EngineError> {
    if count > m {
        return Err(EngineError::TooManyInitial { requested: count, population: m });
    }
    let mut rng = rng::stream(seed, domain::SEEDING, 0, 0);
    let mut picked: Vec<PersonId> = index::sample(&mut rng, m, count).into_iter().map(|i| PersonId(i as u32)).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Runs one epidemic: `initial_infected` seeded uniformly on day 0, then
/// `days` daily steps. Deterministic per `(graph, params, seed)`.
pub fn run_epidemic(
    graph: &ContactGraph,
    params: &DiseaseParams,
    initial_infected: usize,
    days: u32,
    seed: u64,
) -> Result<Vec<DailyCounts>, EngineError> {
    if days == 0 {
        return Err(EngineError::InvalidHorizon);
    }
    let initial = seed_initial(graph.person_count(), initial_infected, seed)?;
    Simulator::new(graph, *params, seed)?.run(&initial, days)
}
