use rand::Rng;
use rayon::prelude::*;

use super::ScenarioError;
use crate::engine::{DiseaseParams, Health, Simulator};
use crate::ingest::PersonId;
use crate::network::ContactGraph;
use crate::rng::{derive_seed, domain, stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub tolerance: f64,
    pub max_iterations: u32,
    pub trials: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions { tolerance: 0.1, max_iterations: 40, trials: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    pub beta: f64,
    pub achieved_r0: f64,
    pub iterations: u32,
}

/// Infections directly caused by `index` over its infectious period when
/// it is the only source: everyone it infects is removed at once.
fn secondary_cases(sim: &Simulator<'_>, index: PersonId) -> usize {
    let mut state = sim.initial_state(&[index]);
    let mut caused = 0;
    for day in 1..=sim.params().infectious_days {
        let out = sim.step(&state, day);
        caused += out.transmissions.iter().filter(|t| t.infector == index).count();
        state = out.state;
        for t in &out.transmissions {
            state.health[t.infectee.index()] = Health::Recovered;
        }
        if state.health[index.index()] != Health::Infectious {
            break;
        }
    }
    caused
}

/// Mean number of secondary infections over `trials` uniformly drawn index
/// cases in a fully susceptible population. Trial `t` uses the same index
/// case and random stream for every `params`, so the estimate is
/// non-decreasing in `beta`.
pub fn estimate_r0(graph: &ContactGraph, params: &DiseaseParams, trials: usize, seed: u64) -> Result<f64, ScenarioError> {
    let m = graph.person_count();
    if m == 0 || trials == 0 {
        return Ok(0.0);
    }
    let sim = Simulator::new(graph, *params, seed)?;
    let total: usize = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let index = PersonId(stream(seed, domain::INDEX_CASE, t, 0).random_range(0..m as u32));
            secondary_cases(&sim.with_seed(derive_seed(seed, domain::CALIBRATION, t)), index)
        })
        .sum();
    Ok(total as f64 / trials as f64)
}

/// Bisection on `beta` over `(0, 1]` until the empirical R0 is within
/// tolerance of `r0_target`. The `beta` of `params` is ignored.
pub fn calibrate_beta(
    r0_target: f64,
    graph: &ContactGraph,
    params: &DiseaseParams,
    seed: u64,
    options: &CalibrationOptions,
) -> Result<CalibrationResult, ScenarioError> {
    if !(r0_target > 0.0 && r0_target.is_finite()) {
        return Err(ScenarioError::InvalidTarget(r0_target));
    }
    if options.trials == 0 || options.max_iterations == 0 || !(options.tolerance > 0.0) {
        return Err(ScenarioError::Config(format!("invalid calibration options {options:?}")));
    }
    let r0_at = |beta: f64| estimate_r0(graph, &DiseaseParams { beta, ..*params }, options.trials, seed);
    let top = r0_at(1.0)?;
    if top < r0_target - options.tolerance {
        return Err(ScenarioError::Unreachable { target: r0_target, max_r0: top });
    }
    if (top - r0_target).abs() <= options.tolerance {
        return Ok(CalibrationResult { beta: 1.0, achieved_r0: top, iterations: 0 });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = CalibrationResult { beta: 1.0, achieved_r0: top, iterations: 0 };
    for iteration in 1..=options.max_iterations {
        let mid = 0.5 * (lo + hi);
        let r0 = r0_at(mid)?;
        if (r0 - r0_target).abs() < (best.achieved_r0 - r0_target).abs() {
            best = CalibrationResult { beta: mid, achieved_r0: r0, iterations: iteration };
        }
        if (r0 - r0_target).abs() <= options.tolerance {
            return Ok(CalibrationResult { beta: mid, achieved_r0: r0, iterations: iteration });
        }
        if r0 < r0_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(ScenarioError::NotConverged { target: r0_target, best_beta: best.beta, best_r0: best.achieved_r0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ContactEvent, ContactKind, Venue};

    fn complete(m: u32) -> ContactGraph {
        let mut events = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                events.push(ContactEvent::new(PersonId(i), PersonId(j), ContactKind::Home, Venue::Vehicle(0), 480.0));
            }
        }
        ContactGraph::from_events(m as usize, events).unwrap()
    }

    fn params(infectious_days: u32) -> DiseaseParams {
        DiseaseParams { beta: 1.0, latent_days: 0, infectious_days, ..DiseaseParams::default() }
    }

    #[test]
    fn saturated_complete_graph() {
        let r0 = estimate_r0(&complete(5), &params(1), 200, 3).unwrap();
        assert_eq!(r0, 4.0);
    }

    #[test]
    fn zero_beta_gives_zero() {
        let p = DiseaseParams { beta: 0.0, ..params(4) };
        assert_eq!(estimate_r0(&complete(5), &p, 200, 3).unwrap(), 0.0);
    }

    #[test]
    fn unreachable_target() {
        // a single edge: R0 is at most 1
        let g = complete(2);
        let err = calibrate_beta(3.0, &g, &params(1), 1, &CalibrationOptions::default()).unwrap_err();
        assert!(matches!(err, ScenarioError::Unreachable { max_r0, .. } if max_r0 == 1.0));
        assert!(matches!(calibrate_beta(0.0, &g, &params(1), 1, &CalibrationOptions::default()), Err(ScenarioError::InvalidTarget(_))));
    }

    #[test]
    fn hits_target_within_tolerance() {
        let g = complete(12);
        let options = CalibrationOptions::default();
        let res = calibrate_beta(2.0, &g, &params(3), 5, &options).unwrap();
        assert!((res.achieved_r0 - 2.0).abs() <= 0.1);
        assert!(res.iterations <= 40);
        let check = estimate_r0(&g, &DiseaseParams { beta: res.beta, ..params(3) }, options.trials, 5).unwrap();
        assert_eq!(check, res.achieved_r0);
    }
}
