use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{CalibrationOptions, ScenarioError};
use crate::engine::DiseaseParams;

/// How the per-contact rate is fixed: calibrated to a target R0 or given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transmission {
    R0(f64),
    Beta(f64),
}

/// One scenario: intervention levels, horizon, replication and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub pttcr_reduction: f64,
    /// `f64::INFINITY` disables transit transmission.
    pub h_threshold_minutes: f64,
    pub transmission: Transmission,
    pub school_closure: bool,
    pub days: u32,
    pub replicates: u32,
    pub seed: u64,
    pub initial_infected: usize,
    /// Natural history and contact rates; `beta` and `h_threshold_minutes`
    /// here are overridden by the fields above.
    pub disease: DiseaseParams,
    pub calibration: CalibrationOptions,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            pttcr_reduction: 0.0,
            h_threshold_minutes: 30.0,
            transmission: Transmission::R0(2.1),
            school_closure: false,
            days: 120,
            replicates: 20,
            seed: 1,
            initial_infected: 10,
            disease: DiseaseParams::default(),
            calibration: CalibrationOptions::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(msg.into())
}

pub(crate) fn check_pttcr(r: f64) -> Result<(), ScenarioError> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(config_err(format!("pttcr_reduction = {r} outside [0, 1]")))
    }
}

pub(crate) fn check_h(h: f64) -> Result<(), ScenarioError> {
    if h > 0.0 {
        Ok(())
    } else {
        Err(config_err(format!("h_threshold = {h} must be positive or inf")))
    }
}

pub(crate) fn check_r0(r0: f64) -> Result<(), ScenarioError> {
    if r0 > 0.0 && r0.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("r0 = {r0} must be positive")))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        check_pttcr(self.pttcr_reduction)?;
        check_h(self.h_threshold_minutes)?;
        match self.transmission {
            Transmission::R0(r0) => check_r0(r0)?,
            Transmission::Beta(b) if !(0.0..=1.0).contains(&b) => {
                return Err(config_err(format!("beta = {b} outside [0, 1]")));
            }
            Transmission::Beta(_) => {}
        }
        if self.replicates == 0 {
            return Err(config_err("replicates must be at least 1"));
        }
        if self.days == 0 {
            return Err(config_err("days must be at least 1"));
        }
        if self.initial_infected == 0 {
            return Err(config_err("initial_infected must be at least 1"));
        }
        let c = &self.calibration;
        if c.trials == 0 || c.max_iterations == 0 || !(c.tolerance > 0.0) {
            return Err(config_err(format!("invalid calibration settings {c:?}")));
        }
        self.disease
            .validate()
            .map_err(|e| config_err(e.to_string()))
    }

    /// Disease parameters for one cell.
    pub fn params(&self, beta: f64, h_minutes: f64) -> DiseaseParams {
        DiseaseParams { beta, h_threshold_minutes: h_minutes, ..self.disease }
    }
}

/// Parses `"inf"`, `"infinity"`, `"∞"` or a positive number of minutes.
pub fn parse_h_minutes(text: &str) -> Option<f64> {
    let t = text.trim();
    if ["inf", "infinity", "∞"].iter().any(|s| t.eq_ignore_ascii_case(s)) {
        return Some(f64::INFINITY);
    }
    t.parse::<f64>().ok().filter(|h| *h > 0.0 && h.is_finite())
}

/// Where the population and transit feed come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic { persons: usize, locations: usize },
    Files { activities: PathBuf, gtfs: PathBuf },
}

/// Axes of a scenario grid. Empty `r0` means the base `beta` is used.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub pttcr: Vec<f64>,
    pub h_minutes: Vec<f64>,
    pub r0: Vec<f64>,
    pub school_closure: Vec<bool>,
}

impl GridSpec {
    /// The one-cell grid of `base`.
    pub fn single(base: &ScenarioConfig) -> GridSpec {
        GridSpec {
            pttcr: vec![base.pttcr_reduction],
            h_minutes: vec![base.h_threshold_minutes],
            r0: match base.transmission {
                Transmission::R0(r0) => vec![r0],
                Transmission::Beta(_) => Vec::new(),
            },
            school_closure: vec![base.school_closure],
        }
    }

    pub fn cell_count(&self) -> usize {
        self.pttcr.len() * self.h_minutes.len() * self.r0.len().max(1) * self.school_closure.len()
    }
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: ScenarioConfig,
    pub data: DataSource,
    pub grid: GridSpec,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HValue {
    Minutes(f64),
    Text(String),
}

impl HValue {
    fn minutes(&self) -> Result<f64, ScenarioError> {
        match self {
            HValue::Minutes(m) => Ok(*m),
            HValue::Text(t) => parse_h_minutes(t).ok_or_else(|| config_err(format!("h_threshold = {t:?}"))),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFile {
    seed: Option<u64>,
    days: Option<u32>,
    replicates: Option<u32>,
    initial_infected: Option<usize>,
    pttcr_reduction: Option<f64>,
    h_threshold: Option<HValue>,
    r0: Option<f64>,
    beta: Option<f64>,
    school_closure: Option<bool>,
    disease: Option<RawDisease>,
    data: Option<RawData>,
    grid: Option<RawGrid>,
    calibration: Option<RawCalibration>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisease {
    c_place: Option<f64>,
    transit_multiplier: Option<f64>,
    latent_days: Option<u32>,
    infectious_days: Option<u32>,
    saturation_minutes_place: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    synthetic_persons: Option<usize>,
    synthetic_locations: Option<usize>,
    activities: Option<PathBuf>,
    gtfs: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    pttcr: Option<Vec<f64>>,
    h: Option<Vec<HValue>>,
    r0: Option<Vec<f64>>,
    school_closure: Option<Vec<bool>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    tolerance: Option<f64>,
    max_iterations: Option<u32>,
    trials: Option<usize>,
}

pub const DEFAULT_SYNTHETIC_PERSONS: usize = 2000;
pub const DEFAULT_SYNTHETIC_LOCATIONS: usize = 840;

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ScenarioFile, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        ScenarioFile::from_toml_str(&text, base)
    }

    /// Parses a scenario file; relative data paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<ScenarioFile, ScenarioError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| config_err(e.to_string().replace('\n', " ")))?;
        let d = ScenarioConfig::default();
        let grid_raw = raw.grid;
        let grid_r0 = grid_raw.as_ref().and_then(|g| g.r0.clone());
        let transmission = match (raw.r0, raw.beta) {
            (Some(_), Some(_)) => return Err(config_err("set exactly one of r0 and beta")),
            (Some(r0), None) => Transmission::R0(r0),
            (None, Some(b)) => {
                if grid_r0.as_ref().is_some_and(|g| !g.is_empty()) {
                    return Err(config_err("grid.r0 cannot be combined with an explicit beta"));
                }
                Transmission::Beta(b)
            }
            (None, None) => match grid_r0.as_deref() {
                Some([first, ..]) => Transmission::R0(*first),
                _ => d.transmission,
            },
        };
        let mut disease = d.disease;
        if let Some(rd) = raw.disease {
            disease.c_place = rd.c_place.unwrap_or(disease.c_place);
            disease.transit_multiplier = rd.transit_multiplier.unwrap_or(disease.transit_multiplier);
            disease.latent_days = rd.latent_days.unwrap_or(disease.latent_days);
            disease.infectious_days = rd.infectious_days.unwrap_or(disease.infectious_days);
            disease.saturation_minutes_place = rd.saturation_minutes_place.unwrap_or(disease.saturation_minutes_place);
        }
        let mut calibration = d.calibration;
        if let Some(rc) = raw.calibration {
            calibration.tolerance = rc.tolerance.unwrap_or(calibration.tolerance);
            calibration.max_iterations = rc.max_iterations.unwrap_or(calibration.max_iterations);
            calibration.trials = rc.trials.unwrap_or(calibration.trials);
        }
        let scenario = ScenarioConfig {
            pttcr_reduction: raw.pttcr_reduction.unwrap_or(d.pttcr_reduction),
            h_threshold_minutes: match raw.h_threshold {
                Some(h) => h.minutes()?,
                None => d.h_threshold_minutes,
            },
            transmission,
            school_closure: raw.school_closure.unwrap_or(d.school_closure),
            days: raw.days.unwrap_or(d.days),
            replicates: raw.replicates.unwrap_or(d.replicates),
            seed: raw.seed.unwrap_or(d.seed),
            initial_infected: raw.initial_infected.unwrap_or(d.initial_infected),
            disease,
            calibration,
        };
        scenario.validate()?;

        let data = match raw.data {
            None => DataSource::Synthetic { persons: DEFAULT_SYNTHETIC_PERSONS, locations: DEFAULT_SYNTHETIC_LOCATIONS },
            Some(rd) => match (rd.activities, rd.gtfs) {
                (Some(a), Some(g)) => {
                    if rd.synthetic_persons.is_some() || rd.synthetic_locations.is_some() {
                        return Err(config_err("data: give either input files or synthetic sizes"));
                    }
                    DataSource::Files { activities: base_dir.join(a), gtfs: base_dir.join(g) }
                }
                (None, None) => DataSource::Synthetic {
                    persons: rd.synthetic_persons.unwrap_or(DEFAULT_SYNTHETIC_PERSONS),
                    locations: rd.synthetic_locations.unwrap_or(DEFAULT_SYNTHETIC_LOCATIONS),
                },
                _ => return Err(config_err("data: activities and gtfs must be given together")),
            },
        };

        let mut grid = GridSpec::single(&scenario);
        if let Some(g) = grid_raw {
            if let Some(p) = g.pttcr {
                grid.pttcr = p;
            }
            if let Some(h) = g.h {
                grid.h_minutes = h.iter().map(HValue::minutes).collect::<Result<_, _>>()?;
            }
            if let Some(r) = g.r0 {
                grid.r0 = r;
            }
            if let Some(c) = g.school_closure {
                grid.school_closure = c;
            }
        }
        validate_grid(&grid)?;
        Ok(ScenarioFile { scenario, data, grid })
    }
}

pub(crate) fn validate_grid(grid: &GridSpec) -> Result<(), ScenarioError> {
    if grid.pttcr.is_empty() {
        return Err(ScenarioError::EmptyGrid("pttcr"));
    }
    if grid.h_minutes.is_empty() {
        return Err(ScenarioError::EmptyGrid("h"));
    }
    if grid.school_closure.is_empty() {
        return Err(ScenarioError::EmptyGrid("school_closure"));
    }
    grid.pttcr.iter().try_for_each(|&r| check_pttcr(r))?;
    grid.h_minutes.iter().try_for_each(|&h| check_h(h))?;
    grid.r0.iter().try_for_each(|&r| check_r0(r))
}
