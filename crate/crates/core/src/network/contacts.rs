use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::graph::ContactGraph;
use super::NetworkError;
use crate::ingest::{LocationId, LocationKind, PersonId, PopulationDataset};

/// Where a contact happened, by category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContactKind {
    Home,
    Work,
    School,
    Other,
    Transit,
}

impl ContactKind {
    pub fn is_transit(self) -> bool {
        self == ContactKind::Transit
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContactKind::Home => "home",
            ContactKind::Work => "work",
            ContactKind::School => "school",
            ContactKind::Other => "other",
            ContactKind::Transit => "transit",
        }
    }
}

impl From<LocationKind> for ContactKind {
    fn from(kind: LocationKind) -> Self {
        match kind {
            LocationKind::Home => ContactKind::Home,
            LocationKind::Work => ContactKind::Work,
            LocationKind::School => ContactKind::School,
            LocationKind::Other => ContactKind::Other,
        }
    }
}

impl fmt::Display for ContactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ContactKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "transit" | "bus" => Ok(ContactKind::Transit),
            other => other.parse::<LocationKind>().map(ContactKind::from),
        }
    }
}

/// The specific place or vehicle trip shared by the two persons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Venue {
    Place(LocationId),
    /// Index into the feed's vehicle runs.
    Vehicle(u32),
}

/// Co-presence of two persons at one venue during the (repeating) day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    /// Always `i < j`.
    pub i: PersonId,
    pub j: PersonId,
    pub kind: ContactKind,
    pub venue: Venue,
    pub minutes: f64,
}

impl ContactEvent {
    /// Builds an event with the endpoints in canonical order.
    pub fn new(a: PersonId, b: PersonId, kind: ContactKind, venue: Venue, minutes: f64) -> ContactEvent {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        ContactEvent { i, j, kind, venue, minutes }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NetworkOptions {
    /// Caps how many earlier overlapping stays each stay is paired with at
    /// one location. `None` means complete mixing.
    pub max_partners_per_stay: Option<usize>,
}

/// Builds the daily contact graph from place co-location plus the given
/// transit co-presence events.
pub fn build_contacts(dataset: &PopulationDataset, transit_events: &[ContactEvent]) -> Result<ContactGraph, NetworkError> {
    build_contacts_with(dataset, transit_events, &NetworkOptions::default())
}

pub fn build_contacts_with(
    dataset: &PopulationDataset,
    transit_events: &[ContactEvent],
    options: &NetworkOptions,
) -> Result<ContactGraph, NetworkError> {
    let mut events = place_contacts(dataset, options);
    events.extend_from_slice(transit_events);
    ContactGraph::from_events(dataset.person_count(), events)
}

/// One event per (location, unordered pair) whose stays overlap, weighted
/// by total overlap minutes. Ordered by (location, i, j).
pub fn place_contacts(dataset: &PopulationDataset, options: &NetworkOptions) -> Vec<ContactEvent> {
    let mut stays: Vec<Vec<(u32, u32, PersonId)>> = vec![Vec::new(); dataset.locations().len()];
    for schedule in dataset.schedules() {
        for a in schedule {
            stays[a.location.index()].push((a.start, a.end(), a.person));
        }
    }
    let per_location: Vec<Vec<ContactEvent>> = stays
        .into_par_iter()
        .enumerate()
        .map(|(loc, mut stays)| {
            let location = LocationId(loc as u32);
            let kind = ContactKind::from(dataset.location(location).kind);
            stays.sort_unstable();
            overlaps(&stays, options.max_partners_per_stay)
                .into_iter()
                .map(|((i, j), minutes)| ContactEvent {
                    i,
                    j,
                    kind,
                    venue: Venue::Place(location),
                    minutes: f64::from(minutes),
                })
                .collect()
        })
        .collect();
    per_location.into_iter().flatten().collect()
}

/// Pairwise overlap totals for stays sorted by start.
fn overlaps(stays: &[(u32, u32, PersonId)], cap: Option<usize>) -> BTreeMap<(PersonId, PersonId), u32> {
    let mut totals = BTreeMap::new();
    let mut active: Vec<(u32, u32, PersonId)> = Vec::new();
    for &(start, end, p) in stays {
        active.retain(|&(_, e, _)| e > start);
        let mut partners = 0;
        for &(_, e, q) in &active {
            if cap.is_some_and(|c| partners >= c) {
                break;
            }
            if q == p {
                continue;
            }
            let overlap = e.min(end) - start;
            if overlap > 0 {
                let key = if p < q { (p, q) } else { (q, p) };
                *totals.entry(key).or_insert(0) += overlap;
                partners += 1;
            }
        }
        active.push((start, end, p));
    }
    totals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ActivityRecord, Location};

    fn dataset(stays: &[(u32, u32, u32, u32)], kinds: &[LocationKind]) -> PopulationDataset {
        // (person, location, start, end); every person also gets a private home
        let n_persons = stays.iter().map(|s| s.0).max().unwrap() as usize + 1;
        let mut locations: Vec<Location> = kinds
            .iter()
            .enumerate()
            .map(|(k, &kind)| Location { label: format!("L{k}"), kind, coord: None })
            .collect();
        let mut schedules: Vec<Vec<ActivityRecord>> = vec![Vec::new(); n_persons];
        for &(p, loc, start, end) in stays {
            schedules[p as usize].push(ActivityRecord {
                person: PersonId(p),
                start,
                duration: end - start,
                location: LocationId(loc),
                kind: kinds[loc as usize],
            });
        }
        for (p, s) in schedules.iter_mut().enumerate() {
            if !s.iter().any(|a| a.kind == LocationKind::Home) {
                let id = LocationId(locations.len() as u32);
                locations.push(Location { label: format!("home{p}"), kind: LocationKind::Home, coord: None });
                s.push(ActivityRecord { person: PersonId(p as u32), start: 1439, duration: 1, location: id, kind: LocationKind::Home });
            }
        }
        let labels = (0..n_persons).map(|p| p.to_string()).collect();
        PopulationDataset::new(labels, schedules, locations, vec![]).unwrap()
    }

    #[test]
    fn shared_home_all_day() {
        let ds = dataset(&[(0, 0, 0, 1440), (1, 0, 0, 1440)], &[LocationKind::Home]);
        let g = build_contacts(&ds, &[]).unwrap();
        assert_eq!(g.events().len(), 1);
        let e = g.events()[0];
        assert_eq!((e.kind, e.minutes), (ContactKind::Home, 1440.0));
    }

    #[test]
    fn work_overlap_minutes() {
        let ds = dataset(&[(0, 0, 480, 1020), (1, 0, 600, 900)], &[LocationKind::Work]);
        let g = build_contacts(&ds, &[]).unwrap();
        assert_eq!(g.events().len(), 1);
        assert_eq!((g.events()[0].kind, g.events()[0].minutes), (ContactKind::Work, 300.0));
    }

    #[test]
    fn four_colocated_give_six_edges() {
        let stays: Vec<_> = (0..4).map(|p| (p, 0, 100, 200)).collect();
        let ds = dataset(&stays, &[LocationKind::Other]);
        let g = build_contacts(&ds, &[]).unwrap();
        // brute force: every unordered pair with overlapping stays
        let mut expected = 0;
        for a in 0..4 {
            for b in a + 1..4 {
                let (sa, sb) = (stays[a], stays[b]);
                if sa.3.min(sb.3) > sa.2.max(sb.2) {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 6);
        assert_eq!(g.events().len(), expected);
    }

    #[test]
    fn repeated_stays_are_merged_per_location() {
        // person 0 is at the cafe twice; person 1 overlaps both visits
        let ds = dataset(&[(0, 0, 100, 200), (0, 0, 300, 400), (1, 0, 150, 350)], &[LocationKind::Other]);
        let g = build_contacts(&ds, &[]).unwrap();
        assert_eq!(g.events().len(), 1);
        assert_eq!(g.events()[0].minutes, 100.0);
    }

    #[test]
    fn touching_stays_do_not_meet() {
        let ds = dataset(&[(0, 0, 100, 200), (1, 0, 200, 300)], &[LocationKind::Other]);
        assert!(build_contacts(&ds, &[]).unwrap().events().is_empty());
    }

    #[test]
    fn transit_events_are_validated() {
        let ds = dataset(&[(0, 0, 0, 1440), (1, 0, 0, 1440)], &[LocationKind::Home]);
        let bad = ContactEvent::new(PersonId(0), PersonId(9), ContactKind::Transit, Venue::Vehicle(0), 5.0);
        assert_eq!(build_contacts(&ds, &[bad]).unwrap_err(), NetworkError::UnknownPerson(PersonId(9)));
        let ok = ContactEvent::new(PersonId(1), PersonId(0), ContactKind::Transit, Venue::Vehicle(0), 5.0);
        let g = build_contacts(&ds, &[ok]).unwrap();
        // parallel edges of different kinds are kept
        assert_eq!(g.events().len(), 2);
        assert_eq!(g.neighbors(PersonId(0)).len(), 2);
    }

    #[test]
    fn partner_cap_limits_pairs() {
        let stays: Vec<_> = (0..5).map(|p| (p, 0, 100, 200)).collect();
        let ds = dataset(&stays, &[LocationKind::Other]);
        let capped = build_contacts_with(&ds, &[], &NetworkOptions { max_partners_per_stay: Some(1) }).unwrap();
        assert_eq!(capped.events().len(), 4);
    }
}
