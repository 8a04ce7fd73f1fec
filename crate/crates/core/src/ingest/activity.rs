//! Resident activity files: one row per stay, header row, comma- or
//! tab-delimited.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;

use super::types::{ActivityRecord, Coord, Location, LocationId, LocationKind, PersonId, PopulationDataset};
use super::IngestError;
use crate::rng::{self, domain};

pub const MINUTES_PER_DAY: u32 = 1440;

/// Default share of residents able to ride public transit.
pub const DEFAULT_ELIGIBLE_FRACTION: f64 = 0.20;

/// Column mapping for activity files, plus the rule used to mark the
/// transit-eligible subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySchema {
    pub person: String,
    pub start: String,
    pub duration: String,
    pub location: String,
    pub kind: String,
    /// Optional coordinate columns; used when present in the header.
    pub latitude: String,
    pub longitude: String,
    pub eligible_fraction: f64,
    pub eligibility_seed: u64,
}

impl Default for ActivitySchema {
    fn default() -> Self {
        ActivitySchema {
            person: "PID".into(),
            start: "STARTTIME".into(),
            duration: "DURATION".into(),
            location: "LOCATION".into(),
            kind: "LOCKIND".into(),
            latitude: "LAT".into(),
            longitude: "LON".into(),
            eligible_fraction: DEFAULT_ELIGIBLE_FRACTION,
            eligibility_seed: 0,
        }
    }
}

pub fn parse_activity_file(path: &Path, schema: &ActivitySchema) -> Result<PopulationDataset, IngestError> {
    let text = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.display().to_string();
    let text = String::from_utf8(text).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count() as u64;
        IngestError::MalformedRow {
            file: name.clone(),
            line,
            reason: "invalid UTF-8".into(),
        }
    })?;
    parse_activity_str(&text, &name, schema)
}

/// Integer minutes or `HH:MM`.
fn parse_minutes(s: &str) -> Option<u32> {
    let s = s.trim();
    match s.split_once(':') {
        Some((h, m)) => {
            let h: u32 = h.parse().ok()?;
            let m: u32 = m.parse().ok()?;
            (m < 60 && h <= 24).then_some(h * 60 + m)
        }
        None => s.parse().ok(),
    }
}

struct Columns {
    person: usize,
    start: usize,
    duration: usize,
    location: usize,
    kind: usize,
    coords: Option<(usize, usize)>,
}

/// Parses activity rows from memory. `name` labels errors.
pub fn parse_activity_str(text: &str, name: &str, schema: &ActivitySchema) -> Result<PopulationDataset, IngestError> {
    if !(0.0..=1.0).contains(&schema.eligible_fraction) {
        return Err(IngestError::InvalidDataset(format!(
            "eligible fraction {} outside [0, 1]",
            schema.eligible_fraction
        )));
    }
    let header_line = text.lines().next().unwrap_or("");
    let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let malformed = |line: u64, reason: String| IngestError::MalformedRow {
        file: name.to_string(),
        line,
        reason,
    };
    let headers = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    let find = |col: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(col));
    let require = |col: &str| {
        find(col).ok_or_else(|| IngestError::MissingColumn {
            file: name.to_string(),
            column: col.to_string(),
        })
    };
    let cols = Columns {
        person: require(&schema.person)?,
        start: require(&schema.start)?,
        duration: require(&schema.duration)?,
        location: require(&schema.location)?,
        kind: require(&schema.kind)?,
        coords: find(&schema.latitude).zip(find(&schema.longitude)),
    };

    let mut person_index: HashMap<String, PersonId> = HashMap::new();
    let mut persons: Vec<String> = Vec::new();
    let mut schedules: Vec<Vec<ActivityRecord>> = Vec::new();
    let mut location_index: HashMap<String, LocationId> = HashMap::new();
    let mut locations: Vec<Location> = Vec::new();

    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let field = |idx: usize, col: &str| {
            record
                .get(idx)
                .ok_or_else(|| malformed(line, format!("missing field {col}")))
        };
        let pid = field(cols.person, &schema.person)?;
        if pid.is_empty() {
            return Err(malformed(line, "empty person id".into()));
        }
        let start_raw = field(cols.start, &schema.start)?;
        let start = parse_minutes(start_raw)
            .filter(|&s| s < MINUTES_PER_DAY)
            .ok_or_else(|| malformed(line, format!("bad start time {start_raw:?}")))?;
        let dur_raw = field(cols.duration, &schema.duration)?;
        let duration = parse_minutes(dur_raw)
            .filter(|&d| d > 0 && d <= MINUTES_PER_DAY)
            .ok_or_else(|| malformed(line, format!("bad duration {dur_raw:?}")))?;
        let loc_label = field(cols.location, &schema.location)?;
        if loc_label.is_empty() {
            return Err(malformed(line, "empty location id".into()));
        }
        let kind: LocationKind = field(cols.kind, &schema.kind)?
            .parse()
            .map_err(|reason| malformed(line, reason))?;
        let coord = match cols.coords {
            Some((lat_col, lon_col)) => {
                let lat = field(lat_col, &schema.latitude)?;
                let lon = field(lon_col, &schema.longitude)?;
                if lat.is_empty() && lon.is_empty() {
                    None
                } else {
                    let parsed = lat
                        .parse::<f64>()
                        .ok()
                        .zip(lon.parse::<f64>().ok())
                        .and_then(|(la, lo)| Coord::new(la, lo));
                    Some(parsed.ok_or_else(|| malformed(line, format!("bad coordinates {lat:?},{lon:?}")))?)
                }
            }
            None => None,
        };

        let location = match location_index.get(loc_label) {
            Some(&id) => {
                let existing = &mut locations[id.index()];
                if existing.kind != kind {
                    return Err(malformed(
                        line,
                        format!("location {loc_label} is both {} and {kind}", existing.kind),
                    ));
                }
                if existing.coord.is_none() {
                    existing.coord = coord;
                }
                id
            }
            None => {
                let id = LocationId(locations.len() as u32);
                locations.push(Location {
                    label: loc_label.to_string(),
                    kind,
                    coord,
                });
                location_index.insert(loc_label.to_string(), id);
                id
            }
        };
        let person = *person_index.entry(pid.to_string()).or_insert_with(|| {
            persons.push(pid.to_string());
            schedules.push(Vec::new());
            PersonId(persons.len() as u32 - 1)
        });

        let end = start + duration;
        let schedule = &mut schedules[person.index()];
        if end <= MINUTES_PER_DAY {
            schedule.push(ActivityRecord { person, start, duration, location, kind });
        } else {
            // Each simulated day replays the same schedule, so the part past
            // midnight wraps onto the start of the day.
            schedule.push(ActivityRecord {
                person,
                start,
                duration: MINUTES_PER_DAY - start,
                location,
                kind,
            });
            schedule.push(ActivityRecord {
                person,
                start: 0,
                duration: end - MINUTES_PER_DAY,
                location,
                kind,
            });
        }
    }

    let eligible = select_eligible(persons.len(), schema.eligible_fraction, schema.eligibility_seed);
    PopulationDataset::new(persons, schedules, locations, eligible)
}

/// Draws exactly `round(fraction * n)` persons, uniformly and reproducibly.
pub(crate) fn select_eligible(n: usize, fraction: f64, seed: u64) -> Vec<PersonId> {
    let count = ((fraction * n as f64).round() as usize).min(n);
    let mut ids: Vec<PersonId> = (0..n as u32).map(PersonId).collect();
    let mut rng = rng::stream(seed, domain::ELIGIBILITY, 0, 0);
    ids.shuffle(&mut rng);
    ids.truncate(count);
    ids.sort_unstable();
    ids
}

/// Writes the dataset in the default activity-file layout (comma-delimited,
/// `PID,STARTTIME,DURATION,LOCATION,LOCKIND,LAT,LON`).
pub fn write_activities<W: Write>(dataset: &PopulationDataset, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["PID", "STARTTIME", "DURATION", "LOCATION", "LOCKIND", "LAT", "LON"])?;
    for p in dataset.person_ids() {
        for a in dataset.activities(p) {
            let loc = dataset.location(a.location);
            let (lat, lon) = match loc.coord {
                Some(c) => (c.lat.to_string(), c.lon.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                dataset.person_label(p),
                &a.start.to_string(),
                &a.duration.to_string(),
                &loc.label,
                a.kind.as_str(),
                &lat,
                &lon,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
