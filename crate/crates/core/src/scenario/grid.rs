use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::config::validate_grid;
use super::{
    apply_school_closure, calibrate_beta, CalibrationResult, GridSpec, ScenarioConfig, ScenarioError, Transmission,
};
use crate::engine::{run_epidemic, DailyCounts};
use crate::ingest::{PopulationDataset, TransitFeed};
use crate::network::{place_contacts, ContactEvent, ContactGraph, NetworkOptions};
use crate::rng::{derive_seed, domain};
use crate::transit::{compute_copresence, PlannerConfig, RiderPool};

/// Grid coordinates of one cell. `r0` is `None` when `beta` was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub pttcr_reduction: f64,
    pub h_minutes: f64,
    pub r0: Option<f64>,
    pub school_closure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    pub replicate: u32,
    pub seed: u64,
    pub series: Vec<DailyCounts>,
    pub attack_rate: f64,
    pub peak_day: u32,
    pub peak_height: usize,
}

/// Per-day means over replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCounts {
    pub day: u32,
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub r: f64,
    pub new_infections: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub beta: f64,
    pub riders: usize,
    pub mean_curve: Vec<MeanCounts>,
    /// Mean over replicates of the fraction ever infected.
    pub attack_rate: f64,
    pub attack_rate_sd: f64,
    /// Day and height of the peak of mean infectious prevalence.
    pub peak_day: u32,
    pub peak_height: f64,
    pub replicates: Vec<ReplicateRun>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Cells in `pttcr`, `h`, `r0`, `school_closure` nesting order.
    pub cells: Vec<CellResult>,
    /// Calibration per requested R0, in grid order.
    pub calibrations: Vec<(f64, CalibrationResult)>,
}

impl GridResult {
    pub fn cell(&self, pttcr: f64, h: f64, r0: Option<f64>, closure: bool) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.key.pttcr_reduction == pttcr && c.key.h_minutes == h && c.key.r0 == r0 && c.key.school_closure == closure
        })
    }
}

struct World {
    dataset: PopulationDataset,
    pool: RiderPool,
    places: Vec<ContactEvent>,
}

impl World {
    fn new(dataset: PopulationDataset, feed: &TransitFeed, seed: u64) -> World {
        let pool = RiderPool::new(&dataset, feed, PlannerConfig::default(), seed);
        let places = place_contacts(&dataset, &NetworkOptions::default());
        World { dataset, pool, places }
    }

    fn graph(&self, pttcr: f64) -> Result<ContactGraph, ScenarioError> {
        let mut events = self.places.clone();
        events.extend(compute_copresence(&self.pool.itineraries(pttcr)));
        Ok(ContactGraph::from_events(self.dataset.person_count(), events)?)
    }
}

/// Runs scenarios over one dataset and feed. Rider order, calibration
/// streams and replicate streams all derive from the base seed, so every
/// cell sees the same random numbers (common random numbers).
///
/// Beta is calibrated once per target R0 on the reference network (no
/// rider reduction, schools open, the base `h`) and reused in every cell,
/// so interventions change the outcome rather than the calibration.
pub struct ScenarioRunner<'a> {
    feed: &'a TransitFeed,
    base: ScenarioConfig,
    open: World,
    closed: OnceLock<World>,
    calibrations: std::sync::Mutex<BTreeMap<u64, CalibrationResult>>,
}

impl<'a> ScenarioRunner<'a> {
    pub fn new(dataset: &PopulationDataset, feed: &'a TransitFeed, base: ScenarioConfig) -> Result<Self, ScenarioError> {
        base.validate()?;
        Ok(ScenarioRunner {
            feed,
            open: World::new(dataset.clone(), feed, base.seed),
            base,
            closed: OnceLock::new(),
            calibrations: Default::default(),
        })
    }

    pub fn base(&self) -> &ScenarioConfig {
        &self.base
    }

    fn world(&self, closure: bool) -> &World {
        if closure {
            self.closed
                .get_or_init(|| World::new(apply_school_closure(&self.open.dataset), self.feed, self.base.seed))
        } else {
            &self.open
        }
    }

    pub fn dataset(&self, closure: bool) -> &PopulationDataset {
        &self.world(closure).dataset
    }

    pub fn riders(&self, pttcr: f64) -> usize {
        self.open.pool.riders(pttcr).len()
    }

    /// The contact graph at one rider reduction, with or without closure.
    pub fn graph(&self, pttcr: f64, closure: bool) -> Result<ContactGraph, ScenarioError> {
        self.world(closure).graph(pttcr)
    }

    pub fn calibrate(&self, r0: f64) -> Result<CalibrationResult, ScenarioError> {
        if let Some(c) = self.calibrations.lock().unwrap().get(&r0.to_bits()) {
            return Ok(*c);
        }
        let graph = self.graph(0.0, false)?;
        let params = self.base.params(1.0, self.base.h_threshold_minutes);
        let c = calibrate_beta(r0, &graph, &params, self.base.seed, &self.base.calibration)?;
        self.calibrations.lock().unwrap().insert(r0.to_bits(), c);
        Ok(c)
    }

    pub fn run_grid(&self, grid: &GridSpec) -> Result<GridResult, ScenarioError> {
        validate_grid(grid)?;
        let betas: Vec<(Option<f64>, f64)> = if grid.r0.is_empty() {
            match self.base.transmission {
                Transmission::Beta(b) => vec![(None, b)],
                Transmission::R0(_) => return Err(ScenarioError::EmptyGrid("r0")),
            }
        } else {
            grid.r0.iter().map(|&r0| Ok((Some(r0), self.calibrate(r0)?.beta))).collect::<Result<_, ScenarioError>>()?
        };
        let calibrations = grid.r0.iter().map(|&r0| Ok((r0, self.calibrate(r0)?))).collect::<Result<_, ScenarioError>>()?;

        let mut graphs = BTreeMap::new();
        for &closure in &grid.school_closure {
            for &p in &grid.pttcr {
                if let std::collections::btree_map::Entry::Vacant(v) = graphs.entry((closure, p.to_bits())) {
                    v.insert(self.graph(p, closure)?);
                }
            }
        }

        let mut cells = Vec::with_capacity(grid.cell_count());
        for &pttcr in &grid.pttcr {
            for &h in &grid.h_minutes {
                for &(r0, beta) in &betas {
                    for &closure in &grid.school_closure {
                        cells.push((CellKey { pttcr_reduction: pttcr, h_minutes: h, r0, school_closure: closure }, beta));
                    }
                }
            }
        }
        let reps = self.base.replicates;
        let runs: Vec<ReplicateRun> = (0..cells.len() * reps as usize)
            .into_par_iter()
            .map(|k| {
                let (key, beta) = cells[k / reps as usize];
                let replicate = (k % reps as usize) as u32;
                let graph = &graphs[&(key.school_closure, key.pttcr_reduction.to_bits())];
                let seed = derive_seed(self.base.seed, domain::REPLICATE, u64::from(replicate));
                let params = self.base.params(beta, key.h_minutes);
                let series = run_epidemic(graph, &params, self.base.initial_infected, self.base.days, seed)?;
                Ok(summarize_replicate(replicate, seed, series))
            })
            .collect::<Result<_, ScenarioError>>()?;

        let mut runs = runs.into_iter();
        let cells = cells
            .into_iter()
            .map(|(key, beta)| {
                let replicates: Vec<ReplicateRun> = runs.by_ref().take(reps as usize).collect();
                aggregate(key, beta, self.riders(key.pttcr_reduction), replicates)
            })
            .collect();
        Ok(GridResult { cells, calibrations })
    }
}

fn summarize_replicate(replicate: u32, seed: u64, series: Vec<DailyCounts>) -> ReplicateRun {
    let last = series.last().expect("at least day 0");
    let m = last.total() as f64;
    let attack_rate = (m - last.s as f64) / m;
    let peak = series.iter().fold(&series[0], |best, c| if c.i > best.i { c } else { best });
    ReplicateRun { replicate, seed, attack_rate, peak_day: peak.day, peak_height: peak.i, series }
}

fn aggregate(key: CellKey, beta: f64, riders: usize, replicates: Vec<ReplicateRun>) -> CellResult {
    let n = replicates.len() as f64;
    let days = replicates[0].series.len();
    let mean_curve: Vec<MeanCounts> = (0..days)
        .map(|d| {
            let mean = |f: fn(&DailyCounts) -> usize| replicates.iter().map(|r| f(&r.series[d]) as f64).sum::<f64>() / n;
            MeanCounts {
                day: replicates[0].series[d].day,
                s: mean(|c| c.s),
                e: mean(|c| c.e),
                i: mean(|c| c.i),
                r: mean(|c| c.r),
                new_infections: mean(|c| c.new_infections),
            }
        })
        .collect();
    let attack_rate = replicates.iter().map(|r| r.attack_rate).sum::<f64>() / n;
    let attack_rate_sd = if replicates.len() > 1 {
        (replicates.iter().map(|r| (r.attack_rate - attack_rate).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let peak = mean_curve.iter().fold(&mean_curve[0], |best, c| if c.i > best.i { c } else { best });
    CellResult {
        key,
        beta,
        riders,
        peak_day: peak.day,
        peak_height: peak.i,
        mean_curve,
        attack_rate,
        attack_rate_sd,
        replicates,
    }
}

/// Runs the grid `pttcr_values x h_values x r0_values` with the base
/// scenario's closure setting. An empty `r0_values` uses the base `beta`.
pub fn run_scenario_grid(
    dataset: &PopulationDataset,
    feed: &TransitFeed,
    base: &ScenarioConfig,
    h_values: &[f64],
    r0_values: &[f64],
    pttcr_values: &[f64],
) -> Result<GridResult, ScenarioError> {
    let grid = GridSpec {
        pttcr: pttcr_values.to_vec(),
        h_minutes: h_values.to_vec(),
        r0: r0_values.to_vec(),
        school_closure: vec![base.school_closure],
    };
    ScenarioRunner::new(dataset, feed, base.clone())?.run_grid(&grid)
}
