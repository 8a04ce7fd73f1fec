//! Earliest-arrival routing with a bounded number of transfers.
//!
//! Round `k` of the scan extends every itinerary with `k - 1` legs by one
//! more vehicle trip. A trip is boarded at the first stop reachable in the
//! previous round and ridden to every later stop; only strict
//! improvements are recorded, so ties resolve to fewer legs.

use crate::ingest::{Coord, ServiceTime, StopIdx, TransitFeed};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Maximum great-circle walk to a boarding stop, or from an alighting
    /// stop, in meters.
    pub walk_radius_m: f64,
    pub walk_speed_m_per_min: f64,
    pub max_transfers: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            walk_radius_m: 800.0,
            walk_speed_m_per_min: 80.0,
            max_transfers: 1,
        }
    }
}

/// One ride on one vehicle trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitLeg {
    /// Index into [`TransitFeed::runs`].
    pub run: u32,
    pub board_stop: StopIdx,
    pub alight_stop: StopIdx,
    pub board_time: ServiceTime,
    pub alight_time: ServiceTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitItinerary {
    pub legs: Vec<TransitLeg>,
    /// When the traveler leaves the origin.
    pub departure: ServiceTime,
    /// Arrival at the destination, including the final walk.
    pub arrival: ServiceTime,
}

impl TransitItinerary {
    /// Checks leg ordering and agreement with the feed's stop times.
    pub fn is_consistent(&self, feed: &TransitFeed) -> bool {
        let legs_ok = self.legs.iter().all(|leg| {
            let Some(run) = feed.runs().get(leg.run as usize) else {
                return false;
            };
            let board = run.stop_sequence.iter().position(|st| st.stop == leg.board_stop && st.departure == leg.board_time);
            let alight = run.stop_sequence.iter().rposition(|st| st.stop == leg.alight_stop && st.arrival == leg.alight_time);
            matches!((board, alight), (Some(b), Some(a)) if b < a) && leg.board_time < leg.alight_time
        });
        let ordered = self.legs.windows(2).all(|w| w[0].alight_time <= w[1].board_time && w[0].alight_stop == w[1].board_stop);
        legs_ok
            && ordered
            && !self.legs.is_empty()
            && self.departure <= self.legs[0].board_time
            && self.legs[self.legs.len() - 1].alight_time <= self.arrival
    }
}

#[derive(Debug, Clone, Copy)]
struct Ride {
    run: u32,
    board: u32,
    alight: u32,
}

const UNREACHED: u32 = u32::MAX;

/// Reusable planner over one feed.
#[derive(Debug, Clone)]
pub struct Planner<'f> {
    feed: &'f TransitFeed,
    config: PlannerConfig,
}

impl<'f> Planner<'f> {
    pub fn new(feed: &'f TransitFeed, config: PlannerConfig) -> Self {
        Planner { feed, config }
    }

    pub fn feed(&self) -> &'f TransitFeed {
        self.feed
    }

    /// Stops within walking radius with their walk time in seconds.
    fn walkable(&self, at: &Coord) -> Vec<(StopIdx, u32)> {
        let speed = self.config.walk_speed_m_per_min / 60.0;
        self.feed
            .stops()
            .iter()
            .enumerate()
            .filter_map(|(k, s)| {
                let d = s.coord.distance_m(at);
                (d <= self.config.walk_radius_m).then(|| (StopIdx(k as u32), (d / speed).ceil() as u32))
            })
            .collect()
    }

    /// Earliest-arrival itinerary leaving `origin` no earlier than
    /// `earliest_departure` (minutes since midnight). `None` when nothing
    /// arrives before the end of the day.
    pub fn plan(&self, origin: &Coord, destination: &Coord, earliest_departure: u32) -> Option<TransitItinerary> {
        let access = self.walkable(origin);
        let egress = self.walkable(destination);
        if access.is_empty() || egress.is_empty() {
            return None;
        }
        let depart = earliest_departure.checked_mul(60)?;
        let n = self.feed.stops().len();
        let rounds = self.config.max_transfers + 1;
        let runs = self.feed.runs();

        // reach[k]: earliest arrival with at most k rides (walking counts
        // as zero rides), used for boarding. ridden[k]: the same over
        // itineraries with at least one ride, used for egress.
        let mut reach = vec![vec![UNREACHED; n]; rounds + 1];
        let mut ridden = vec![vec![UNREACHED; n]; rounds + 1];
        let mut parent: Vec<Vec<Option<Ride>>> = vec![vec![None; n]; rounds + 1];
        for &(s, walk) in &access {
            let t = depart.saturating_add(walk);
            if t < reach[0][s.index()] {
                reach[0][s.index()] = t;
            }
        }
        for k in 1..=rounds {
            reach[k] = reach[k - 1].clone();
            ridden[k] = ridden[k - 1].clone();
            let mut improved = false;
            for (r, run) in runs.iter().enumerate() {
                if run.last_arrival().seconds() <= depart {
                    continue;
                }
                let mut boarded: Option<u32> = None;
                for (pos, st) in run.stop_sequence.iter().enumerate() {
                    let s = st.stop.index();
                    if let Some(board) = boarded {
                        let arr = st.arrival.seconds();
                        if arr < ridden[k][s] {
                            ridden[k][s] = arr;
                            parent[k][s] = Some(Ride { run: r as u32, board, alight: pos as u32 });
                            reach[k][s] = reach[k][s].min(arr);
                            improved = true;
                        }
                    } else if pos + 1 < run.stop_sequence.len() && reach[k - 1][s] <= st.departure.seconds() {
                        boarded = Some(pos as u32);
                    }
                }
            }
            if !improved {
                break;
            }
        }

        let mut best: Option<(u32, usize, StopIdx)> = None;
        for k in 1..=rounds {
            for &(s, walk) in &egress {
                if parent[k][s.index()].is_none() {
                    continue;
                }
                let total = ridden[k][s.index()].saturating_add(walk);
                let key = (total, k, s);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (arrival, mut k, mut stop) = best.filter(|b| b.0 < ServiceTime::DAY)?;

        let mut legs = Vec::with_capacity(k);
        loop {
            let ride = parent[k][stop.index()].expect("labelled stop has a parent");
            let run = &runs[ride.run as usize];
            let board = run.stop_sequence[ride.board as usize];
            let alight = run.stop_sequence[ride.alight as usize];
            legs.push(TransitLeg {
                run: ride.run,
                board_stop: board.stop,
                alight_stop: alight.stop,
                board_time: board.departure,
                alight_time: alight.arrival,
            });
            // The boarding label is the earliest round holding the same time;
            // round 0 means the traveler walked there.
            let ready = reach[k - 1][board.stop.index()];
            let j = (0..k).find(|&j| reach[j][board.stop.index()] == ready).expect("boarding label exists");
            if j == 0 {
                break;
            }
            k = j;
            stop = board.stop;
        }
        legs.reverse();
        Some(TransitItinerary {
            legs,
            departure: ServiceTime(depart),
            arrival: ServiceTime(arrival),
        })
    }
}

/// Plans with the default walk radius, speed and transfer limit.
pub fn plan_itinerary(origin: &Coord, destination: &Coord, earliest_departure: u32, feed: &TransitFeed) -> Option<TransitItinerary> {
    Planner::new(feed, PlannerConfig::default()).plan(origin, destination, earliest_departure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_gtfs_tables, GtfsTables};

    // Stops A, B, C, D placed 2 km apart on a line (beyond walking range of
    // each other).
    fn feed(stop_times: &str, trips: &str) -> TransitFeed {
        parse_gtfs_tables(&GtfsTables {
            stops: "stop_id,stop_lat,stop_lon\nA,37.00,-80.00\nB,37.02,-80.00\nC,37.04,-80.00\nD,37.06,-80.00\n".into(),
            routes: "route_id\nR1\nR2\n".into(),
            trips: format!("route_id,trip_id\n{trips}"),
            stop_times: format!("trip_id,arrival_time,departure_time,stop_id,stop_sequence\n{stop_times}"),
        })
        .unwrap()
    }

    fn at(feed: &TransitFeed, id: &str) -> Coord {
        feed.stop(feed.stop_by_id(id).unwrap()).coord
    }

    #[test]
    fn single_trip() {
        let f = feed("T1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,B,2\n", "R1,T1\n");
        let it = plan_itinerary(&at(&f, "A"), &at(&f, "B"), 450, &f).unwrap();
        assert_eq!(it.legs.len(), 1);
        assert_eq!(it.legs[0].board_time, ServiceTime::from_minutes(480));
        assert_eq!(it.arrival, ServiceTime::from_minutes(490));
        assert!(it.is_consistent(&f));
    }

    #[test]
    fn no_service_after_last_trip() {
        let f = feed("T1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,B,2\n", "R1,T1\n");
        assert!(plan_itinerary(&at(&f, "A"), &at(&f, "B"), 540, &f).is_none());
    }

    #[test]
    fn wrong_direction_is_infeasible() {
        let f = feed("T1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,B,2\n", "R1,T1\n");
        assert!(plan_itinerary(&at(&f, "B"), &at(&f, "A"), 400, &f).is_none());
    }

    #[test]
    fn past_midnight_arrival_is_not_same_day() {
        let f = feed("T1,23:55:00,23:55:00,A,1\nT1,24:10:00,24:10:00,B,2\n", "R1,T1\n");
        assert!(plan_itinerary(&at(&f, "A"), &at(&f, "B"), 1400, &f).is_none());
    }

    #[test]
    fn one_transfer() {
        let f = feed(
            "T1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,B,2\nT2,08:15:00,08:15:00,B,1\nT2,08:30:00,08:30:00,C,2\n",
            "R1,T1\nR2,T2\n",
        );
        let it = plan_itinerary(&at(&f, "A"), &at(&f, "C"), 470, &f).unwrap();
        assert_eq!(it.legs.len(), 2);
        assert_eq!(it.arrival, ServiceTime::from_minutes(510));
        assert!(it.is_consistent(&f));

        let direct = Planner::new(&f, PlannerConfig { max_transfers: 0, ..PlannerConfig::default() });
        assert!(direct.plan(&at(&f, "A"), &at(&f, "C"), 470).is_none());
    }

    #[test]
    fn missed_connection() {
        let f = feed(
            "T1,08:00:00,08:00:00,A,1\nT1,08:20:00,08:20:00,B,2\nT2,08:15:00,08:15:00,B,1\nT2,08:30:00,08:30:00,C,2\n",
            "R1,T1\nR2,T2\n",
        );
        assert!(plan_itinerary(&at(&f, "A"), &at(&f, "C"), 470, &f).is_none());
    }

    #[test]
    fn outside_walk_radius() {
        let f = feed("T1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,B,2\n", "R1,T1\n");
        let far = at(&f, "A").offset_m(0.0, -900.0);
        assert!(plan_itinerary(&far, &at(&f, "B"), 400, &f).is_none());
        let near = at(&f, "A").offset_m(0.0, -700.0);
        let it = plan_itinerary(&near, &at(&f, "B"), 400, &f).unwrap();
        assert_eq!(it.legs[0].board_time, ServiceTime::from_minutes(480));
    }
}
