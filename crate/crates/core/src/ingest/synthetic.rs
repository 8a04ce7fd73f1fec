//! Deterministic synthetic towns: a grid-shaped transit feed and a
//! population whose schedules alternate home stays with outside activities.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::activity::{select_eligible, DEFAULT_ELIGIBLE_FRACTION, MINUTES_PER_DAY};
use super::types::{
    ActivityRecord, Coord, GtfsStop, Location, LocationId, LocationKind, PersonId, PopulationDataset,
    ServiceTime, StopIdx, StopTime, TransitFeed, VehicleRun,
};
use super::IngestError;
use crate::rng::{self, domain};

/// Four straight bus lines (two east-west, two north-south) over a square
/// grid of stops, crossing at four shared transfer stops.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFeedConfig {
    pub center: Coord,
    pub stop_spacing_m: f64,
    pub stops_per_route: usize,
    /// Offset of each line from the town center, in meters.
    pub line_offset_m: f64,
    pub headway_min: u32,
    pub first_departure_min: u32,
    pub last_departure_min: u32,
    pub minutes_between_stops: u32,
}

impl Default for GridFeedConfig {
    fn default() -> Self {
        GridFeedConfig {
            center: Coord { lat: 37.2296, lon: -80.4139 },
            stop_spacing_m: 500.0,
            stops_per_route: 8,
            line_offset_m: 750.0,
            headway_min: 30,
            first_departure_min: 360,
            last_departure_min: 1320,
            minutes_between_stops: 2,
        }
    }
}

pub fn generate_grid_feed(config: &GridFeedConfig) -> TransitFeed {
    let n = config.stops_per_route.max(2);
    let span = config.stop_spacing_m * (n - 1) as f64;
    let positions: Vec<i64> = (0..n)
        .map(|k| (-span / 2.0 + config.stop_spacing_m * k as f64).round() as i64)
        .collect();
    let off = config.line_offset_m.round() as i64;

    // (route, direction-agnostic stop positions)
    let lines: Vec<(String, Vec<(i64, i64)>)> = vec![
        ("H1".into(), positions.iter().map(|&x| (x, -off)).collect()),
        ("H2".into(), positions.iter().map(|&x| (x, off)).collect()),
        ("V1".into(), positions.iter().map(|&y| (-off, y)).collect()),
        ("V2".into(), positions.iter().map(|&y| (off, y)).collect()),
    ];

    let mut by_pos: BTreeMap<(i64, i64), StopIdx> = BTreeMap::new();
    for (_, pts) in &lines {
        for &p in pts {
            by_pos.entry(p).or_insert(StopIdx(0));
        }
    }
    let mut stops = Vec::with_capacity(by_pos.len());
    for (k, (&(x, y), idx)) in by_pos.iter_mut().enumerate() {
        *idx = StopIdx(k as u32);
        stops.push(GtfsStop {
            stop_id: format!("S{x:+}{y:+}"),
            coord: config.center.offset_m(x as f64, y as f64),
        });
    }

    let mut runs = Vec::new();
    for (route, pts) in &lines {
        for (dir, forward) in [("a", true), ("b", false)] {
            let mut seq: Vec<StopIdx> = pts.iter().map(|p| by_pos[p]).collect();
            if !forward {
                seq.reverse();
            }
            let mut dep = config.first_departure_min;
            while dep <= config.last_departure_min {
                let stop_sequence = seq
                    .iter()
                    .enumerate()
                    .map(|(k, &stop)| {
                        let t = ServiceTime::from_minutes(dep + k as u32 * config.minutes_between_stops);
                        StopTime { stop, arrival: t, departure: t }
                    })
                    .collect();
                runs.push(VehicleRun {
                    trip_id: format!("{route}{dir}-{:02}{:02}", dep / 60, dep % 60),
                    route_id: route.clone(),
                    stop_sequence,
                });
                dep += config.headway_min.max(1);
            }
        }
    }
    let routes = lines.into_iter().map(|(r, _)| r).collect();
    TransitFeed::from_parts(stops, routes, runs)
}

/// Distributions behind [`generate_synthetic_population`]. None of these
/// are measured values; they are tunable defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub mean_household_size: f64,
    /// Weights of (student, worker, neither).
    pub role_weights: [f64; 3],
    /// Weights of drawing 0, 1, 2, 3 or 4 outside activities. Each outside
    /// activity after the first is preceded by a home stay, so a person
    /// with `n` activities has `2n + 1` records.
    pub extra_activity_weights: [f64; 5],
    /// Weights of (work, school, other) among non-home locations.
    pub public_kind_weights: [f64; 3],
    pub eligible_fraction: f64,
    /// Locations are scattered uniformly in a square of this half-width
    /// around a random stop.
    pub placement_radius_m: f64,
    pub leave_home: (u32, u32),
    pub school_minutes: (u32, u32),
    pub work_minutes: (u32, u32),
    pub other_minutes: (u32, u32),
    pub home_gap_minutes: (u32, u32),
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            mean_household_size: 2.5,
            role_weights: [0.25, 0.45, 0.30],
            extra_activity_weights: [0.04, 0.16, 0.36, 0.32, 0.12],
            public_kind_weights: [0.4, 0.2, 0.4],
            eligible_fraction: DEFAULT_ELIGIBLE_FRACTION,
            placement_radius_m: 450.0,
            leave_home: (390, 540),
            school_minutes: (360, 420),
            work_minutes: (420, 540),
            other_minutes: (30, 150),
            home_gap_minutes: (20, 90),
        }
    }
}

pub fn generate_synthetic_population(
    n_persons: usize,
    n_locations: usize,
    feed: &TransitFeed,
    seed: u64,
) -> Result<PopulationDataset, IngestError> {
    generate_synthetic_population_with(&SyntheticConfig::default(), n_persons, n_locations, feed, seed)
}

#[derive(Clone, Copy)]
enum Role {
    Student,
    Worker,
    Neither,
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (u32, u32)) -> u32 {
    rng.random_range(lo..=hi.max(lo))
}

/// Builds a town with `n_persons` residents and `n_locations` locations in
/// total (homes included). A single location yields a one-home town whose
/// residents stay home all day; otherwise at least one location per kind
/// is required.
pub fn generate_synthetic_population_with(
    config: &SyntheticConfig,
    n_persons: usize,
    n_locations: usize,
    feed: &TransitFeed,
    seed: u64,
) -> Result<PopulationDataset, IngestError> {
    if n_persons == 0 {
        return Err(IngestError::InvalidScale("n_persons must be at least 1".into()));
    }
    if feed.stops().is_empty() {
        return Err(IngestError::InvalidScale("transit feed has no stops".into()));
    }
    if n_locations == 0 || (n_locations > 1 && n_locations < LocationKind::ALL.len()) {
        return Err(IngestError::InvalidScale(format!(
            "n_locations = {n_locations}; need 1 or at least {}",
            LocationKind::ALL.len()
        )));
    }
    let invalid = |what: &str| IngestError::InvalidScale(format!("invalid synthetic config: {what}"));
    let roles = WeightedIndex::new(config.role_weights).map_err(|_| invalid("role_weights"))?;
    let extras = WeightedIndex::new(config.extra_activity_weights).map_err(|_| invalid("extra_activity_weights"))?;
    if !(config.mean_household_size >= 1.0) {
        return Err(invalid("mean_household_size"));
    }

    let mut rng = rng::stream(seed, domain::SYNTHETIC, 0, 0);
    let stops = feed.stops();
    let place = |rng: &mut ChaCha8Rng| {
        let anchor = stops[rng.random_range(0..stops.len())].coord;
        let r = config.placement_radius_m;
        anchor.offset_m(rng.random_range(-r..=r), rng.random_range(-r..=r))
    };

    let persons: Vec<String> = (0..n_persons).map(|p| format!("P{p}")).collect();
    let eligible = select_eligible(n_persons, config.eligible_fraction, seed);

    if n_locations == 1 {
        let locations = vec![Location {
            label: "H0".into(),
            kind: LocationKind::Home,
            coord: Some(place(&mut rng)),
        }];
        let schedules = (0..n_persons as u32)
            .map(|p| {
                vec![ActivityRecord {
                    person: PersonId(p),
                    start: 0,
                    duration: MINUTES_PER_DAY,
                    location: LocationId(0),
                    kind: LocationKind::Home,
                }]
            })
            .collect();
        return PopulationDataset::new(persons, schedules, locations, eligible);
    }

    let public_kinds = [LocationKind::Work, LocationKind::School, LocationKind::Other];
    let n_homes = ((n_persons as f64 / config.mean_household_size).round() as usize).clamp(1, n_locations - 3);
    let per_kind = allocate(n_locations - n_homes, &config.public_kind_weights);

    let mut locations = Vec::with_capacity(n_locations);
    for h in 0..n_homes {
        locations.push(Location {
            label: format!("H{h}"),
            kind: LocationKind::Home,
            coord: Some(place(&mut rng)),
        });
    }
    let mut by_kind: [Vec<LocationId>; 3] = Default::default();
    for (k, (&kind, &count)) in public_kinds.iter().zip(&per_kind).enumerate() {
        let prefix = match kind {
            LocationKind::Work => "W",
            LocationKind::School => "S",
            _ => "O",
        };
        for i in 0..count {
            by_kind[k].push(LocationId(locations.len() as u32));
            locations.push(Location {
                label: format!("{prefix}{i}"),
                kind,
                coord: Some(place(&mut rng)),
            });
        }
    }
    let [work, school, other] = &by_kind;

    // Every home gets at least one resident.
    let mut order: Vec<usize> = (0..n_persons).collect();
    order.shuffle(&mut rng);
    let mut home_of = vec![LocationId(0); n_persons];
    for (k, &p) in order.iter().enumerate() {
        home_of[p] = if k < n_homes {
            LocationId(k as u32)
        } else {
            LocationId(rng.random_range(0..n_homes) as u32)
        };
    }

    let mut schedules = Vec::with_capacity(n_persons);
    for (p, &home) in home_of.iter().enumerate() {
        let person = PersonId(p as u32);
        let role = match roles.sample(&mut rng) {
            0 => Role::Student,
            1 => Role::Worker,
            _ => Role::Neither,
        };
        let primary = match role {
            Role::Student => Some((school[rng.random_range(0..school.len())], LocationKind::School, config.school_minutes)),
            Role::Worker => Some((work[rng.random_range(0..work.len())], LocationKind::Work, config.work_minutes)),
            Role::Neither => None,
        };
        let n_extra = extras.sample(&mut rng);
        let mut records = Vec::with_capacity(2 * n_extra + 1);
        let record = |start: u32, end: u32, location: LocationId, kind: LocationKind| ActivityRecord {
            person,
            start,
            duration: end - start,
            location,
            kind,
        };

        let mut t = if n_extra > 0 { uniform(&mut rng, config.leave_home) } else { MINUTES_PER_DAY };
        records.push(record(0, t, home, LocationKind::Home));
        for k in 0..n_extra {
            let (loc, kind, dur) = match (k, primary) {
                (0, Some((loc, kind, range))) => (loc, kind, uniform(&mut rng, range)),
                _ => (
                    other[rng.random_range(0..other.len())],
                    LocationKind::Other,
                    uniform(&mut rng, config.other_minutes),
                ),
            };
            let gap = if k > 0 { uniform(&mut rng, config.home_gap_minutes) } else { 0 };
            // Leave at least half an hour at home before midnight.
            if t + gap + dur + 30 > MINUTES_PER_DAY {
                break;
            }
            if gap > 0 {
                records.push(record(t, t + gap, home, LocationKind::Home));
                t += gap;
            }
            records.push(record(t, t + dur, loc, kind));
            t += dur;
        }
        if t < MINUTES_PER_DAY {
            records.push(record(t, MINUTES_PER_DAY, home, LocationKind::Home));
        }
        schedules.push(records);
    }
    PopulationDataset::new(persons, schedules, locations, eligible)
}

/// Splits `total >= weights.len()` into per-weight counts of at least one,
/// distributing the rest by largest remainder.
fn allocate(total: usize, weights: &[f64; 3]) -> [usize; 3] {
    let mut counts = [1usize; 3];
    let rest = total.saturating_sub(3);
    let sum: f64 = weights.iter().sum();
    let shares: Vec<f64> = weights.iter().map(|w| w / sum * rest as f64).collect();
    let mut assigned = 0;
    for (c, s) in counts.iter_mut().zip(&shares) {
        *c += s.floor() as usize;
        assigned += s.floor() as usize;
    }
    let mut by_remainder: Vec<usize> = (0..3).collect();
    by_remainder.sort_by(|&a, &b| {
        let (ra, rb) = (shares[a] - shares[a].floor(), shares[b] - shares[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in by_remainder.iter().take(rest - assigned) {
        counts[k] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_activities;

    fn feed() -> TransitFeed {
        generate_grid_feed(&GridFeedConfig::default())
    }

    #[test]
    fn grid_feed_shape() {
        let f = feed();
        assert_eq!(f.routes().len(), 4);
        assert_eq!(f.stops().len(), 4 * 8 - 4);
        assert!(f.runs().iter().all(|r| r.check_times() && r.stop_sequence.len() == 8));
        // 06:00..=22:00 every 30 min, both directions, four routes
        assert_eq!(f.runs().len(), 4 * 2 * 33);
    }

    #[test]
    fn single_person_single_location_stays_home() {
        let ds = generate_synthetic_population(1, 1, &feed(), 0).unwrap();
        let acts = ds.activities(PersonId(0));
        assert_eq!(acts.len(), 1);
        assert_eq!((acts[0].start, acts[0].end(), acts[0].kind), (0, 1440, LocationKind::Home));
    }

    #[test]
    fn same_seed_gives_identical_bytes() {
        let f = feed();
        let bytes = |seed| {
            let mut buf = Vec::new();
            write_activities(&generate_synthetic_population(1000, 440, &f, seed).unwrap(), &mut buf).unwrap();
            buf
        };
        assert_eq!(bytes(7), bytes(7));
        assert_ne!(bytes(7), bytes(8));
    }

    #[test]
    fn eligible_fraction_is_exact() {
        let ds = generate_synthetic_population(1000, 440, &feed(), 7).unwrap();
        assert_eq!(ds.transit_eligible().len(), 200);
    }

    #[test]
    fn scale_validation() {
        let f = feed();
        assert!(matches!(generate_synthetic_population(10, 3, &f, 0), Err(IngestError::InvalidScale(_))));
        assert!(matches!(generate_synthetic_population(10, 0, &f, 0), Err(IngestError::InvalidScale(_))));
        assert!(matches!(generate_synthetic_population(0, 10, &f, 0), Err(IngestError::InvalidScale(_))));
        let ds = generate_synthetic_population(10, 4, &f, 0).unwrap();
        assert_eq!(ds.locations().len(), 4);
    }

    #[test]
    fn aggregate_shape_matches_defaults() {
        let ds = generate_synthetic_population(4000, 1640, &feed(), 1).unwrap();
        assert_eq!(ds.locations().len(), 1640);
        let per_person = ds.activity_count() as f64 / ds.person_count() as f64;
        assert!((per_person - 5.4).abs() < 0.3, "mean records per person {per_person}");
        for kind in LocationKind::ALL {
            assert!(ds.locations().iter().any(|l| l.kind == kind));
        }
    }

    #[test]
    fn allocation_sums_and_covers_kinds() {
        for total in 3..50 {
            let c = allocate(total, &[0.4, 0.2, 0.4]);
            assert_eq!(c.iter().sum::<usize>(), total);
            assert!(c.iter().all(|&x| x >= 1));
        }
    }
}
