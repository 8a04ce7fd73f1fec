use std::collections::BTreeMap;

use rayon::prelude::*;

use super::planner::TransitItinerary;
use crate::ingest::PersonId;
use crate::network::{ContactEvent, ContactKind, Venue};

/// Pairs of riders sharing a vehicle trip at the same time. Mixing is
/// complete within a trip and absent across trips; one event per trip and
/// unordered pair, weighted by overlap minutes, sorted by (trip, i, j).
pub fn compute_copresence(itineraries: &BTreeMap<PersonId, Vec<TransitItinerary>>) -> Vec<ContactEvent> {
    // (run, board_s, alight_s, person)
    let mut rides: Vec<(u32, u32, u32, PersonId)> = itineraries
        .iter()
        .flat_map(|(&p, its)| {
            its.iter()
                .flat_map(|it| &it.legs)
                .map(move |l| (l.run, l.board_time.seconds(), l.alight_time.seconds(), p))
        })
        .collect();
    rides.sort_unstable();

    let groups: Vec<&[(u32, u32, u32, PersonId)]> = rides.chunk_by(|a, b| a.0 == b.0).collect();
    let per_trip: Vec<Vec<ContactEvent>> = groups
        .par_iter()
        .map(|group| {
            let run = group[0].0;
            let mut totals: BTreeMap<(PersonId, PersonId), u32> = BTreeMap::new();
            for (a, &(_, board_a, alight_a, p)) in group.iter().enumerate() {
                // sorted by boarding time: later riders start inside our window
                for &(_, board_b, alight_b, q) in &group[a + 1..] {
                    if board_b >= alight_a {
                        break;
                    }
                    if p == q {
                        continue;
                    }
                    let overlap = alight_a.min(alight_b) - board_b.max(board_a);
                    if overlap > 0 {
                        *totals.entry((p.min(q), p.max(q))).or_insert(0) += overlap;
                    }
                }
            }
            totals
                .into_iter()
                .map(|((i, j), secs)| ContactEvent {
                    i,
                    j,
                    kind: ContactKind::Transit,
                    venue: Venue::Vehicle(run),
                    minutes: f64::from(secs) / 60.0,
                })
                .collect()
        })
        .collect();
    per_trip.into_iter().flatten().collect()
}
