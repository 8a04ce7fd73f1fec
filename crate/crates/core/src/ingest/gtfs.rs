//! GTFS subset: `stops.txt`, `routes.txt`, `trips.txt`, `stop_times.txt`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use super::types::{Coord, GtfsStop, ServiceTime, StopIdx, StopTime, TransitFeed, VehicleRun};
use super::{IngestError, RefKind};

/// Raw contents of the four GTFS tables.
#[derive(Debug, Clone, Default)]
pub struct GtfsTables {
    pub stops: String,
    pub routes: String,
    pub trips: String,
    pub stop_times: String,
}

const STOPS: &str = "stops.txt";
const ROUTES: &str = "routes.txt";
const TRIPS: &str = "trips.txt";
const STOP_TIMES: &str = "stop_times.txt";

pub fn parse_gtfs_feed(dir: &Path) -> Result<TransitFeed, IngestError> {
    let read = |name: &str| -> Result<String, IngestError> {
        let path = dir.join(name);
        if !path.is_file() {
            return Err(IngestError::MissingFile(name.to_string()));
        }
        let bytes = std::fs::read(&path).map_err(|source| IngestError::Io { path, source })?;
        String::from_utf8(bytes).map_err(|_| IngestError::MalformedRow {
            file: name.to_string(),
            line: 0,
            reason: "invalid UTF-8".into(),
        })
    };
    let tables = GtfsTables {
        stops: read(STOPS)?,
        routes: read(ROUTES)?,
        trips: read(TRIPS)?,
        stop_times: read(STOP_TIMES)?,
    };
    parse_gtfs_tables(&tables)
}

/// A header-indexed view over one GTFS table.
struct Table<'a> {
    name: &'static str,
    reader: csv::Reader<&'a [u8]>,
    columns: HashMap<String, usize>,
}

impl<'a> Table<'a> {
    fn open(name: &'static str, text: &'a str) -> Result<Self, IngestError> {
        // GTFS files are frequently written with a UTF-8 byte-order mark.
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| IngestError::MalformedRow {
            file: name.to_string(),
            line: 1,
            reason: e.to_string(),
        })?;
        let columns = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        Ok(Table { name, reader, columns })
    }

    fn column(&self, col: &str) -> Result<usize, IngestError> {
        self.columns.get(col).copied().ok_or_else(|| IngestError::MissingColumn {
            file: self.name.to_string(),
            column: col.to_string(),
        })
    }

    /// Visits every data row as `(line, fields-by-requested-column)`.
    fn rows<const N: usize>(
        mut self,
        cols: [&str; N],
        mut visit: impl FnMut(u64, [&str; N]) -> Result<(), IngestError>,
    ) -> Result<(), IngestError> {
        let mut idx = [0usize; N];
        for (slot, col) in idx.iter_mut().zip(cols) {
            *slot = self.column(col)?;
        }
        let name = self.name;
        for result in self.reader.records() {
            let record = result.map_err(|e| IngestError::MalformedRow {
                file: name.to_string(),
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            let mut fields = [""; N];
            for (k, &i) in idx.iter().enumerate() {
                fields[k] = record.get(i).ok_or_else(|| IngestError::MalformedRow {
                    file: name.to_string(),
                    line,
                    reason: format!("missing field {}", cols[k]),
                })?;
            }
            visit(line, fields)?;
        }
        Ok(())
    }
}

fn malformed(file: &str, line: u64, reason: String) -> IngestError {
    IngestError::MalformedRow {
        file: file.to_string(),
        line,
        reason,
    }
}

fn non_empty<'s>(file: &str, line: u64, what: &str, v: &'s str) -> Result<&'s str, IngestError> {
    if v.is_empty() {
        Err(malformed(file, line, format!("empty {what}")))
    } else {
        Ok(v)
    }
}

pub fn parse_gtfs_tables(tables: &GtfsTables) -> Result<TransitFeed, IngestError> {
    let mut stops: Vec<GtfsStop> = Vec::new();
    let mut stop_index: HashMap<String, StopIdx> = HashMap::new();
    Table::open(STOPS, &tables.stops)?.rows(["stop_id", "stop_lat", "stop_lon"], |line, [id, lat, lon]| {
        let id = non_empty(STOPS, line, "stop_id", id)?;
        let coord = lat
            .parse::<f64>()
            .ok()
            .zip(lon.parse::<f64>().ok())
            .and_then(|(la, lo)| Coord::new(la, lo))
            .ok_or_else(|| malformed(STOPS, line, format!("bad coordinates {lat:?},{lon:?}")))?;
        if stop_index.insert(id.to_string(), StopIdx(stops.len() as u32)).is_some() {
            return Err(IngestError::DuplicateId {
                file: STOPS.into(),
                line,
                kind: RefKind::Stop,
                id: id.into(),
            });
        }
        stops.push(GtfsStop {
            stop_id: id.to_string(),
            coord,
        });
        Ok(())
    })?;

    let mut routes: Vec<String> = Vec::new();
    let mut route_set: HashSet<String> = HashSet::new();
    Table::open(ROUTES, &tables.routes)?.rows(["route_id"], |line, [id]| {
        let id = non_empty(ROUTES, line, "route_id", id)?;
        if !route_set.insert(id.to_string()) {
            return Err(IngestError::DuplicateId {
                file: ROUTES.into(),
                line,
                kind: RefKind::Route,
                id: id.into(),
            });
        }
        routes.push(id.to_string());
        Ok(())
    })?;

    let mut trips: Vec<(String, String)> = Vec::new();
    let mut trip_index: HashMap<String, usize> = HashMap::new();
    Table::open(TRIPS, &tables.trips)?.rows(["route_id", "trip_id"], |line, [route, trip]| {
        let trip = non_empty(TRIPS, line, "trip_id", trip)?;
        if !route_set.contains(route) {
            return Err(IngestError::DanglingReference {
                file: TRIPS.into(),
                line,
                kind: RefKind::Route,
                id: route.into(),
            });
        }
        if trip_index.insert(trip.to_string(), trips.len()).is_some() {
            return Err(IngestError::DuplicateId {
                file: TRIPS.into(),
                line,
                kind: RefKind::Trip,
                id: trip.into(),
            });
        }
        trips.push((trip.to_string(), route.to_string()));
        Ok(())
    })?;

    let mut per_trip: Vec<BTreeMap<u32, StopTime>> = vec![BTreeMap::new(); trips.len()];
    Table::open(STOP_TIMES, &tables.stop_times)?.rows(
        ["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"],
        |line, [trip, arr, dep, stop, seq]| {
            let t = *trip_index.get(trip).ok_or_else(|| IngestError::DanglingReference {
                file: STOP_TIMES.into(),
                line,
                kind: RefKind::Trip,
                id: trip.into(),
            })?;
            let stop = *stop_index.get(stop).ok_or_else(|| IngestError::DanglingReference {
                file: STOP_TIMES.into(),
                line,
                kind: RefKind::Stop,
                id: stop.into(),
            })?;
            let time = |raw: &str| -> Result<Option<ServiceTime>, IngestError> {
                if raw.is_empty() {
                    return Ok(None);
                }
                ServiceTime::parse(raw)
                    .map(Some)
                    .ok_or_else(|| malformed(STOP_TIMES, line, format!("bad time {raw:?}")))
            };
            let (arrival, departure) = match (time(arr)?, time(dep)?) {
                (Some(a), Some(d)) => (a, d),
                (Some(a), None) => (a, a),
                (None, Some(d)) => (d, d),
                (None, None) => return Err(malformed(STOP_TIMES, line, "no arrival or departure time".into())),
            };
            let seq: u32 = seq
                .parse()
                .map_err(|_| malformed(STOP_TIMES, line, format!("bad stop_sequence {seq:?}")))?;
            if per_trip[t].insert(seq, StopTime { stop, arrival, departure }).is_some() {
                return Err(malformed(STOP_TIMES, line, format!("duplicate stop_sequence {seq} in trip {trip}")));
            }
            Ok(())
        },
    )?;

    let mut runs = Vec::with_capacity(trips.len());
    for ((trip_id, route_id), seq) in trips.into_iter().zip(per_trip) {
        if seq.len() < 2 {
            return Err(IngestError::ShortTrip(trip_id));
        }
        let run = VehicleRun {
            trip_id,
            route_id,
            stop_sequence: seq.into_values().collect(),
        };
        if !run.check_times() {
            return Err(IngestError::NonMonotonicTimes(run.trip_id));
        }
        runs.push(run);
    }
    Ok(TransitFeed::from_parts(stops, routes, runs))
}

/// Writes the feed as the four GTFS tables under `dir`.
pub fn write_gtfs_feed(feed: &TransitFeed, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join(STOPS))?;
    w.write_record(["stop_id", "stop_lat", "stop_lon"])?;
    for s in feed.stops() {
        w.write_record([s.stop_id.as_str(), &s.coord.lat.to_string(), &s.coord.lon.to_string()])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(ROUTES))?;
    w.write_record(["route_id"])?;
    for r in feed.routes() {
        w.write_record([r])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(TRIPS))?;
    w.write_record(["route_id", "trip_id"])?;
    for run in feed.runs() {
        w.write_record([&run.route_id, &run.trip_id])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(STOP_TIMES))?;
    w.write_record(["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"])?;
    for run in feed.runs() {
        for (k, st) in run.stop_sequence.iter().enumerate() {
            w.write_record([
                run.trip_id.as_str(),
                &st.arrival.to_string(),
                &st.departure.to_string(),
                &feed.stop(st.stop).stop_id,
                &(k + 1).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> GtfsTables {
        GtfsTables {
            stops: "stop_id,stop_name,stop_lat,stop_lon\nA,Alpha,37.20,-80.40\nB,Beta,37.21,-80.40\n".into(),
            routes: "route_id,route_short_name\nR1,1\n".into(),
            trips: "route_id,service_id,trip_id\nR1,WK,T1\n".into(),
            stop_times: "trip_id,arrival_time,departure_time,stop_id,stop_sequence\nT1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,B,2\n".into(),
        }
    }

    #[test]
    fn minimal_feed() {
        let feed = parse_gtfs_tables(&minimal()).unwrap();
        assert_eq!(feed.runs().len(), 1);
        let run = &feed.runs()[0];
        assert_eq!(run.stop_sequence.len(), 2);
        assert_eq!(run.first_departure(), ServiceTime::from_minutes(480));
        assert_eq!(run.last_arrival(), ServiceTime::from_minutes(490));
        assert_eq!(feed.stop(run.stop_sequence[1].stop).stop_id, "B");
    }

    #[test]
    fn unknown_stop_is_dangling() {
        let mut t = minimal();
        t.stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\nT1,08:00:00,08:00:00,A,1\nT1,08:10:00,08:10:00,X,2\n".into();
        let err = parse_gtfs_tables(&t).unwrap_err();
        assert!(
            matches!(err, IngestError::DanglingReference { kind: RefKind::Stop, ref id, line: 3, .. } if id == "X"),
            "{err:?}"
        );
    }

    #[test]
    fn backwards_times_rejected() {
        let mut t = minimal();
        t.stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\nT1,08:10:00,08:10:00,A,1\nT1,08:05:00,08:05:00,B,2\n".into();
        assert!(matches!(parse_gtfs_tables(&t), Err(IngestError::NonMonotonicTimes(ref id)) if id == "T1"));
    }

    #[test]
    fn stop_times_sorted_by_sequence() {
        let mut t = minimal();
        t.stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\nT1,08:10:00,08:10:00,B,20\nT1,08:00:00,08:00:00,A,3\n".into();
        let feed = parse_gtfs_tables(&t).unwrap();
        assert_eq!(feed.stop(feed.runs()[0].stop_sequence[0].stop).stop_id, "A");
    }

    #[test]
    fn late_night_times_allowed() {
        let mut t = minimal();
        t.stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\nT1,23:55:00,23:55:00,A,1\nT1,24:05:00,24:05:00,B,2\n".into();
        let feed = parse_gtfs_tables(&t).unwrap();
        let last = feed.runs()[0].last_arrival();
        assert!(last.is_next_day());
        assert_eq!(last.minute_of_day(), 5);
    }

    #[test]
    fn structural_errors() {
        let mut t = minimal();
        t.stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\nT1,08:00:00,08:00:00,A,1\n".into();
        assert!(matches!(parse_gtfs_tables(&t), Err(IngestError::ShortTrip(_))));

        let mut t = minimal();
        t.trips = "route_id,trip_id\nR9,T1\n".into();
        assert!(matches!(
            parse_gtfs_tables(&t),
            Err(IngestError::DanglingReference { kind: RefKind::Route, .. })
        ));

        let mut t = minimal();
        t.stops = "stop_id,stop_lat\nA,37.2\n".into();
        assert!(matches!(parse_gtfs_tables(&t), Err(IngestError::MissingColumn { ref column, .. }) if column == "stop_lon"));

        let mut t = minimal();
        t.stops.push_str("A,Dup,37.0,-80.0\n");
        assert!(matches!(parse_gtfs_tables(&t), Err(IngestError::DuplicateId { line: 4, .. })));
    }

    #[test]
    fn directory_round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(parse_gtfs_feed(dir.path()), Err(IngestError::MissingFile(ref f)) if f == "stops.txt"));
        let feed = parse_gtfs_tables(&minimal()).unwrap();
        write_gtfs_feed(&feed, dir.path()).unwrap();
        assert_eq!(parse_gtfs_feed(dir.path()).unwrap(), feed);
    }
}
