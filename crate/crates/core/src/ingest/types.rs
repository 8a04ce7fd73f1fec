use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::activity::MINUTES_PER_DAY;
use super::IngestError;

/// Dense person index into a [`PopulationDataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PersonId(pub u32);

impl PersonId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense location index into a [`PopulationDataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocationId(pub u32);

impl LocationId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocationKind {
    Home,
    Work,
    School,
    Other,
}

impl LocationKind {
    pub const ALL: [LocationKind; 4] = [
        LocationKind::Home,
        LocationKind::Work,
        LocationKind::School,
        LocationKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LocationKind::Home => "home",
            LocationKind::Work => "work",
            LocationKind::School => "school",
            LocationKind::Other => "other",
        }
    }
}

impl fmt::Display for LocationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LocationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "home" => Ok(LocationKind::Home),
            "work" => Ok(LocationKind::Work),
            "school" => Ok(LocationKind::School),
            "other" => Ok(LocationKind::Other),
            other => Err(format!("unknown location kind {other:?}")),
        }
    }
}

/// WGS84 position in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord {
    pub lat: f64,
    pub lon: f64,
}

const EARTH_RADIUS_M: f64 = 6_371_008.8;

impl Coord {
    pub fn new(lat: f64, lon: f64) -> Option<Coord> {
        let valid = lat.is_finite()
            && lon.is_finite()
            && (-90.0..=90.0).contains(&lat)
            && (-180.0..=180.0).contains(&lon);
        valid.then_some(Coord { lat, lon })
    }

    /// Great-circle distance in meters (haversine).
    pub fn distance_m(&self, other: &Coord) -> f64 {
        let (p1, p2) = (self.lat.to_radians(), other.lat.to_radians());
        let dp = p2 - p1;
        let dl = (other.lon - self.lon).to_radians();
        let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
    }

    /// Moves the point by a local east/north offset in meters.
    pub fn offset_m(&self, east: f64, north: f64) -> Coord {
        let dlat = north / (EARTH_RADIUS_M.to_radians());
        let dlon = east / (EARTH_RADIUS_M.to_radians() * self.lat.to_radians().cos());
        Coord {
            lat: self.lat + dlat,
            lon: self.lon + dlon,
        }
    }
}

/// One stay of one person at one location, within a single day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivityRecord {
    pub person: PersonId,
    /// Minutes since midnight, in `[0, 1440)`.
    pub start: u32,
    /// Minutes, `> 0`; `start + duration <= 1440`.
    pub duration: u32,
    pub location: LocationId,
    pub kind: LocationKind,
}

impl ActivityRecord {
    pub fn end(&self) -> u32 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub label: String,
    pub kind: LocationKind,
    pub coord: Option<Coord>,
}

/// A validated population: persons, their daily schedules, the locations
/// they visit, and the subset that can ride public transit.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationDataset {
    persons: Vec<String>,
    activities: Vec<Vec<ActivityRecord>>,
    locations: Vec<Location>,
    transit_eligible: Vec<PersonId>,
}

impl PopulationDataset {
    /// Validates and assembles a dataset. Each person's activities are
    /// sorted by start time; `transit_eligible` is sorted and deduplicated.
    pub fn new(
        persons: Vec<String>,
        mut activities: Vec<Vec<ActivityRecord>>,
        locations: Vec<Location>,
        mut transit_eligible: Vec<PersonId>,
    ) -> Result<Self, IngestError> {
        if activities.len() != persons.len() {
            return Err(IngestError::InvalidDataset(format!(
                "{} persons but {} schedules",
                persons.len(),
                activities.len()
            )));
        }
        for (p, schedule) in activities.iter_mut().enumerate() {
            schedule.sort_by_key(|a| (a.start, a.end()));
            let label = &persons[p];
            for a in schedule.iter() {
                if a.person.index() != p {
                    return Err(IngestError::InvalidDataset(format!(
                        "activity of person {} filed under {label}",
                        a.person
                    )));
                }
                if a.duration == 0 || a.start >= MINUTES_PER_DAY || a.end() > MINUTES_PER_DAY {
                    return Err(IngestError::InvalidDataset(format!(
                        "person {label}: activity [{}, {}) outside the day",
                        a.start,
                        a.end()
                    )));
                }
                let loc = locations.get(a.location.index()).ok_or_else(|| {
                    IngestError::InvalidDataset(format!(
                        "person {label}: unknown location {}",
                        a.location.0
                    ))
                })?;
                if loc.kind != a.kind {
                    return Err(IngestError::InvalidDataset(format!(
                        "person {label}: activity kind {} at {} location {}",
                        a.kind, loc.kind, loc.label
                    )));
                }
            }
            if schedule.windows(2).any(|w| w[0].end() > w[1].start) {
                return Err(IngestError::OverlappingActivities(label.clone()));
            }
            if !schedule.iter().any(|a| a.kind == LocationKind::Home) {
                return Err(IngestError::MissingHome(label.clone()));
            }
        }
        transit_eligible.sort_unstable();
        transit_eligible.dedup();
        if let Some(p) = transit_eligible.iter().find(|p| p.index() >= persons.len()) {
            return Err(IngestError::InvalidDataset(format!(
                "transit-eligible person {p} does not exist"
            )));
        }
        Ok(PopulationDataset {
            persons,
            activities,
            locations,
            transit_eligible,
        })
    }

    pub fn person_count(&self) -> usize {
        self.persons.len()
    }

    pub fn person_label(&self, p: PersonId) -> &str {
        &self.persons[p.index()]
    }

    pub fn person_labels(&self) -> &[String] {
        &self.persons
    }

    pub fn person_ids(&self) -> impl Iterator<Item = PersonId> + '_ {
        (0..self.persons.len() as u32).map(PersonId)
    }

    /// The person's schedule, sorted by start time.
    pub fn activities(&self, p: PersonId) -> &[ActivityRecord] {
        &self.activities[p.index()]
    }

    pub fn schedules(&self) -> &[Vec<ActivityRecord>] {
        &self.activities
    }

    pub fn activity_count(&self) -> usize {
        self.activities.iter().map(Vec::len).sum()
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn location(&self, id: LocationId) -> &Location {
        &self.locations[id.index()]
    }

    pub fn transit_eligible(&self) -> &[PersonId] {
        &self.transit_eligible
    }

    /// Location of the person's first home stay.
    pub fn home_of(&self, p: PersonId) -> LocationId {
        self.activities(p)
            .iter()
            .find(|a| a.kind == LocationKind::Home)
            .map(|a| a.location)
            .expect("validated dataset: every person has a home")
    }

    /// Replaces all schedules, re-validating the result.
    pub fn with_schedules(
        &self,
        activities: Vec<Vec<ActivityRecord>>,
    ) -> Result<PopulationDataset, IngestError> {
        PopulationDataset::new(
            self.persons.clone(),
            activities,
            self.locations.clone(),
            self.transit_eligible.clone(),
        )
    }
}

/// A GTFS time of day in seconds since the start of the service day.
/// Values of 24:00:00 and later denote trips running past midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServiceTime(pub u32);

impl ServiceTime {
    pub const DAY: u32 = 86_400;

    pub fn from_hms(h: u32, m: u32, s: u32) -> ServiceTime {
        ServiceTime(h * 3600 + m * 60 + s)
    }

    pub fn from_minutes(m: u32) -> ServiceTime {
        ServiceTime(m * 60)
    }

    pub fn seconds(self) -> u32 {
        self.0
    }

    pub fn minutes(self) -> f64 {
        f64::from(self.0) / 60.0
    }

    /// Minute of the (normalized) day, `[0, 1440)`.
    pub fn minute_of_day(self) -> u32 {
        (self.0 % Self::DAY) / 60
    }

    /// True for times at or past 24:00:00.
    pub fn is_next_day(self) -> bool {
        self.0 >= Self::DAY
    }

    /// Parses `H:MM:SS` (hours may exceed 23).
    pub fn parse(s: &str) -> Option<ServiceTime> {
        let mut parts = s.trim().split(':');
        let h: u32 = parts.next()?.trim().parse().ok()?;
        let m: u32 = parts.next()?.parse().ok()?;
        let sec: u32 = parts.next()?.parse().ok()?;
        if parts.next().is_some() || m >= 60 || sec >= 60 || h >= 48 {
            return None;
        }
        Some(ServiceTime::from_hms(h, m, sec))
    }
}

impl fmt::Display for ServiceTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        write!(f, "{:02}:{:02}:{:02}", s / 3600, (s / 60) % 60, s % 60)
    }
}

/// Index into [`TransitFeed::stops`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StopIdx(pub u32);

impl StopIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GtfsStop {
    pub stop_id: String,
    pub coord: Coord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopTime {
    pub stop: StopIdx,
    pub arrival: ServiceTime,
    pub departure: ServiceTime,
}

/// One scheduled vehicle trip. Times strictly increase along the sequence
/// and `arrival <= departure` at every stop.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleRun {
    pub trip_id: String,
    pub route_id: String,
    pub stop_sequence: Vec<StopTime>,
}

impl VehicleRun {
    pub fn first_departure(&self) -> ServiceTime {
        self.stop_sequence[0].departure
    }

    pub fn last_arrival(&self) -> ServiceTime {
        self.stop_sequence[self.stop_sequence.len() - 1].arrival
    }

    pub(crate) fn check_times(&self) -> bool {
        self.stop_sequence.iter().all(|st| st.arrival <= st.departure)
            && self
                .stop_sequence
                .windows(2)
                .all(|w| w[0].departure < w[1].arrival)
    }
}

/// A parsed, validated GTFS schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitFeed {
    stops: Vec<GtfsStop>,
    stop_index: HashMap<String, StopIdx>,
    routes: Vec<String>,
    runs: Vec<VehicleRun>,
}

impl TransitFeed {
    /// Assembles a feed; callers guarantee referential integrity and run
    /// invariants (the GTFS parser and the synthetic generator both do).
    pub(crate) fn from_parts(stops: Vec<GtfsStop>, routes: Vec<String>, runs: Vec<VehicleRun>) -> Self {
        let stop_index = stops
            .iter()
            .enumerate()
            .map(|(i, s)| (s.stop_id.clone(), StopIdx(i as u32)))
            .collect();
        TransitFeed {
            stops,
            stop_index,
            routes,
            runs,
        }
    }

    pub fn stops(&self) -> &[GtfsStop] {
        &self.stops
    }

    pub fn stop(&self, idx: StopIdx) -> &GtfsStop {
        &self.stops[idx.index()]
    }

    pub fn stop_by_id(&self, id: &str) -> Option<StopIdx> {
        self.stop_index.get(id).copied()
    }

    pub fn routes(&self) -> &[String] {
        &self.routes
    }

    pub fn runs(&self) -> &[VehicleRun] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.stops.is_empty() || self.runs.is_empty()
    }
}
