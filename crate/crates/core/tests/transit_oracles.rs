use std::collections::BTreeSet;

use proptest::prelude::*;

use transit_epi_core::ingest::{
    generate_grid_feed, generate_synthetic_population, parse_gtfs_tables, Coord, GridFeedConfig, GtfsTables,
    PersonId, ServiceTime, TransitFeed,
};
use transit_epi_core::network::ContactEvent;
use transit_epi_core::transit::{
    compute_copresence, plan_itinerary, riding_minutes, PlannerConfig, RiderPool, TransitItinerary,
};

const ORIGIN: (f64, f64) = (37.2, -80.4);

#[derive(Debug, Clone)]
struct RunSpec {
    stops: Vec<usize>,
    start_min: u32,
    hops: Vec<u32>,
    dwell: Vec<u32>,
}

fn run_spec(n_stops: usize) -> impl Strategy<Value = RunSpec> {
    (Just((0..n_stops).collect::<Vec<_>>()).prop_shuffle(), 2..=n_stops.min(5), 300u32..1420)
        .prop_flat_map(|(order, len, start_min)| {
            (
                Just(order[..len].to_vec()),
                Just(start_min),
                proptest::collection::vec(1u32..20, len - 1),
                proptest::collection::vec(0u32..3, len),
            )
        })
        .prop_map(|(stops, start_min, hops, dwell)| RunSpec { stops, start_min, hops, dwell })
}

fn hms(secs: u32) -> String {
    format!("{:02}:{:02}:{:02}", secs / 3600, secs / 60 % 60, secs % 60)
}

fn build_feed(spacing: &[f64], runs: &[RunSpec]) -> TransitFeed {
    let base = Coord::new(ORIGIN.0, ORIGIN.1).unwrap();
    let mut stops = String::from("stop_id,stop_lat,stop_lon\n");
    let mut north = 0.0;
    for (k, gap) in spacing.iter().enumerate() {
        north += gap;
        let c = base.offset_m(0.0, north);
        stops.push_str(&format!("S{k},{},{}\n", c.lat, c.lon));
    }
    let mut trips = String::from("route_id,trip_id\n");
    let mut times = String::from("trip_id,arrival_time,departure_time,stop_id,stop_sequence\n");
    for (r, run) in runs.iter().enumerate() {
        trips.push_str(&format!("R,T{r}\n"));
        let mut t = run.start_min * 60;
        for (k, &s) in run.stops.iter().enumerate() {
            if k > 0 {
                t += run.hops[k - 1] * 60;
            }
            let dep = t + run.dwell[k] * 60;
            times.push_str(&format!("T{r},{},{},S{s},{}\n", hms(t), hms(dep), k + 1));
            t = dep;
        }
    }
    parse_gtfs_tables(&GtfsTables { stops, routes: "route_id\nR\n".into(), trips, stop_times: times }).unwrap()
}

/// Earliest arrival over every itinerary of one or two rides with a
/// same-stop transfer, enumerated directly from the stop times.
fn enumerate(feed: &TransitFeed, origin: &Coord, dest: &Coord, depart_min: u32) -> Option<u32> {
    let cfg = PlannerConfig::default();
    let speed = cfg.walk_speed_m_per_min / 60.0;
    let walk = |a: &Coord, b: &Coord| {
        let d = a.distance_m(b);
        (d <= cfg.walk_radius_m).then(|| (d / speed).ceil() as u32)
    };
    let depart = depart_min * 60;
    let mut best: Option<u32> = None;
    let mut consider = |t: u32| {
        if t < ServiceTime::DAY && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };
    for run in feed.runs() {
        let seq = &run.stop_sequence;
        for i in 0..seq.len() {
            let Some(access) = walk(origin, &feed.stop(seq[i].stop).coord) else { continue };
            if depart + access > seq[i].departure.seconds() {
                continue;
            }
            for j in i + 1..seq.len() {
                let reached = seq[j].arrival.seconds();
                if let Some(egress) = walk(&feed.stop(seq[j].stop).coord, dest) {
                    consider(reached + egress);
                }
                for second in feed.runs() {
                    let s2 = &second.stop_sequence;
                    for a in 0..s2.len() {
                        if s2[a].stop != seq[j].stop || s2[a].departure.seconds() < reached {
                            continue;
                        }
                        for b in a + 1..s2.len() {
                            if let Some(egress) = walk(&feed.stop(s2[b].stop).coord, dest) {
                                consider(s2[b].arrival.seconds() + egress);
                            }
                        }
                    }
                }
            }
        }
    }
    best
}

fn check_itinerary(feed: &TransitFeed, it: &TransitItinerary, origin: &Coord, dest: &Coord, depart_min: u32) {
    assert!(it.is_consistent(feed));
    assert!(it.legs.len() <= 2);
    assert_eq!(it.departure.seconds(), depart_min * 60);
    let first = feed.stop(it.legs[0].board_stop).coord;
    let last = feed.stop(it.legs.last().unwrap().alight_stop).coord;
    assert!(first.distance_m(origin) <= 800.0);
    assert!(last.distance_m(dest) <= 800.0);
    let egress = (last.distance_m(dest) / (80.0 / 60.0)).ceil() as u32;
    assert_eq!(it.arrival.seconds(), it.legs.last().unwrap().alight_time.seconds() + egress);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn planner_matches_exhaustive_enumeration(
        spacing in proptest::collection::vec(200.0f64..1500.0, 6),
        runs in proptest::collection::vec(run_spec(6), 1..6),
        from in 0usize..6,
        to in 0usize..6,
        offsets in (-500.0f64..500.0, -500.0f64..500.0),
        depart in 280u32..1430,
    ) {
        let feed = build_feed(&spacing, &runs);
        let origin = feed.stops()[from].coord.offset_m(offsets.0, 0.0);
        let dest = feed.stops()[to].coord.offset_m(offsets.1, 0.0);
        let planned = plan_itinerary(&origin, &dest, depart, &feed);
        let oracle = enumerate(&feed, &origin, &dest, depart);
        prop_assert_eq!(planned.as_ref().map(|it| it.arrival.seconds()), oracle);
        if let Some(it) = planned {
            check_itinerary(&feed, &it, &origin, &dest, depart);
        }
    }
}

#[test]
fn earlier_of_two_candidate_trips_wins() {
    let spec = |start: u32, hop: u32| RunSpec { stops: vec![0, 1], start_min: start, hops: vec![hop], dwell: vec![0, 0] };
    // both leave S0 at 08:00; one arrives at S1 08:10, the other 08:25
    let feed = build_feed(&[0.0, 2000.0], &[spec(480, 25), spec(480, 10)]);
    let (a, b) = (feed.stops()[0].coord, feed.stops()[1].coord);
    let it = plan_itinerary(&a, &b, 470, &feed).unwrap();
    assert_eq!(it.arrival, ServiceTime::from_minutes(490));
    assert_eq!(enumerate(&feed, &a, &b, 470), Some(490 * 60));
}

fn desk_pool() -> (RiderPool, usize) {
    let feed = generate_grid_feed(&GridFeedConfig::default());
    let town = generate_synthetic_population(1000, 420, &feed, 21).unwrap();
    let pool = RiderPool::new(&town, &feed, PlannerConfig::default(), 21);
    (pool, town.person_count())
}

fn pairs(events: &[ContactEvent]) -> BTreeSet<(u32, u32, String)> {
    events.iter().map(|e| (e.i.0, e.j.0, format!("{:?}{}", e.venue, e.minutes))).collect()
}

#[test]
fn copresence_is_conserved_symmetric_and_nested() {
    let (pool, m) = desk_pool();
    let mut previous: Option<BTreeSet<(u32, u32, String)>> = None;
    for reduction in [0.0, 0.25, 0.5, 0.9, 1.0] {
        let riders = pool.itineraries(reduction);
        let events = compute_copresence(&riders);
        for e in &events {
            assert!(e.i < e.j && e.j.index() < m);
            assert!(e.kind.is_transit());
            // nobody shares more time aboard than either partner spends riding
            let (ri, rj) = (riding_minutes(&riders[&e.i]), riding_minutes(&riders[&e.j]));
            assert!(e.minutes <= ri.min(rj) + 1e-9, "{e:?} {ri} {rj}");
            assert!(riders.contains_key(&e.i) && riders.contains_key(&e.j));
        }
        let current = pairs(&events);
        if let Some(prev) = &previous {
            assert!(current.is_subset(prev), "reduction {reduction} added transit contacts");
        }
        previous = Some(current);
    }
    assert!(compute_copresence(&pool.itineraries(1.0)).is_empty());
}

#[test]
fn rider_sets_are_nested_prefixes() {
    let (pool, _) = desk_pool();
    let full: Vec<PersonId> = pool.riders(0.0).to_vec();
    for r in [0.1, 0.5, 0.9] {
        let sub = pool.riders(r);
        assert_eq!(sub, &full[..sub.len()]);
        assert_eq!(sub.len(), ((1.0 - r) * full.len() as f64 - 1e-9).ceil() as usize);
    }
}
