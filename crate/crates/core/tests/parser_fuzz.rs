use proptest::prelude::*;

use transit_epi_core::ingest::{parse_activity_str, parse_gtfs_tables, ActivitySchema, GtfsTables, IngestError};

const ACTIVITIES: &str = "PID,STARTTIME,DURATION,LOCATION,LOCKIND,LAT,LON
p1,0,480,h1,home,37.20,-80.40
p1,480,540,w1,work,37.21,-80.41
p1,1020,420,h1,home,37.20,-80.40
p2,01:00,06:30,h2,home,37.22,-80.40
p2,450,420,s1,school,37.23,-80.42
p2,1380,120,h2,home,37.22,-80.40
";

fn gtfs() -> GtfsTables {
    GtfsTables {
        stops: "stop_id,stop_name,stop_lat,stop_lon\nA,a,37.20,-80.40\nB,b,37.21,-80.40\nC,c,37.22,-80.40\n".into(),
        routes: "route_id,route_short_name\nR1,1\n".into(),
        trips: "route_id,service_id,trip_id\nR1,wk,T1\nR1,wk,T2\n".into(),
        stop_times: "trip_id,arrival_time,departure_time,stop_id,stop_sequence
T1,08:00:00,08:00:00,A,1
T1,08:05:00,08:06:00,B,2
T1,08:12:00,08:12:00,C,3
T2,23:50:00,23:50:00,C,1
T2,24:05:00,24:05:00,A,2
"
        .into(),
    }
}

#[derive(Debug, Clone)]
enum Edit {
    DeleteChar(usize),
    InsertChar(usize, char),
    ReplaceChar(usize, char),
    DeleteLine(usize),
    DuplicateLine(usize),
    SwapLines(usize, usize),
    ReplaceField(usize, usize, String),
}

fn edit() -> impl Strategy<Value = Edit> {
    let ch = prop_oneof![
        Just(','),
        Just('\n'),
        Just('"'),
        Just(':'),
        Just('-'),
        Just('\t'),
        Just('\u{feff}'),
        proptest::char::range('0', '9'),
        proptest::char::any(),
    ];
    let field = prop_oneof![
        Just(String::new()),
        Just("-1".to_string()),
        Just("99:99:99".to_string()),
        Just("1e309".to_string()),
        Just("NaN".to_string()),
        Just("4294967296".to_string()),
        Just("home".to_string()),
        Just("B".to_string()),
        "[ -~]{0,8}",
    ];
    prop_oneof![
        any::<usize>().prop_map(Edit::DeleteChar),
        (any::<usize>(), ch.clone()).prop_map(|(i, c)| Edit::InsertChar(i, c)),
        (any::<usize>(), ch).prop_map(|(i, c)| Edit::ReplaceChar(i, c)),
        any::<usize>().prop_map(Edit::DeleteLine),
        any::<usize>().prop_map(Edit::DuplicateLine),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Edit::SwapLines(a, b)),
        (any::<usize>(), any::<usize>(), field).prop_map(|(l, f, v)| Edit::ReplaceField(l, f, v)),
    ]
}

fn apply(text: &str, edit: &Edit) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let pick = |i: usize, n: usize| if n == 0 { 0 } else { i % n };
    match edit {
        Edit::DeleteChar(i) if !chars.is_empty() => {
            let mut c = chars.clone();
            c.remove(pick(*i, chars.len()));
            return c.into_iter().collect();
        }
        Edit::InsertChar(i, ch) => {
            let mut c = chars.clone();
            c.insert(pick(*i, chars.len() + 1), *ch);
            return c.into_iter().collect();
        }
        Edit::ReplaceChar(i, ch) if !chars.is_empty() => {
            let mut c = chars.clone();
            c[pick(*i, chars.len())] = *ch;
            return c.into_iter().collect();
        }
        Edit::DeleteLine(i) if !lines.is_empty() => {
            lines.remove(pick(*i, lines.len()));
        }
        Edit::DuplicateLine(i) if !lines.is_empty() => {
            let k = pick(*i, lines.len());
            lines.insert(k, lines[k].clone());
        }
        Edit::SwapLines(a, b) if !lines.is_empty() => {
            let (a, b) = (pick(*a, lines.len()), pick(*b, lines.len()));
            lines.swap(a, b);
        }
        Edit::ReplaceField(l, f, v) if !lines.is_empty() => {
            let k = pick(*l, lines.len());
            let mut fields: Vec<String> = lines[k].split(',').map(str::to_string).collect();
            let j = pick(*f, fields.len());
            fields[j] = v.clone();
            lines[k] = fields.join(",");
        }
        _ => {}
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn located(err: &IngestError) -> bool {
    err.location().is_some()
}

#[test]
fn seeds_parse() {
    parse_activity_str(ACTIVITIES, "activities.csv", &ActivitySchema::default()).unwrap();
    parse_gtfs_tables(&gtfs()).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn mutated_activity_files_fail_with_located_errors(edits in proptest::collection::vec(edit(), 1..6)) {
        let text = edits.iter().fold(ACTIVITIES.to_string(), |t, e| apply(&t, e));
        if let Err(e) = parse_activity_str(&text, "activities.csv", &ActivitySchema::default()) {
            prop_assert!(located(&e), "{e:?}");
        }
    }

    #[test]
    fn mutated_gtfs_tables_fail_with_located_errors(
        table in 0usize..4,
        edits in proptest::collection::vec(edit(), 1..6),
    ) {
        let mut t = gtfs();
        let target = match table {
            0 => &mut t.stops,
            1 => &mut t.routes,
            2 => &mut t.trips,
            _ => &mut t.stop_times,
        };
        *target = edits.iter().fold(target.clone(), |acc, e| apply(&acc, e));
        if let Err(e) = parse_gtfs_tables(&t) {
            prop_assert!(located(&e), "{e:?}");
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[a-zA-Z0-9,:\\t\\n\" .-]{0,300}") {
        if let Err(e) = parse_activity_str(&text, "activities.csv", &ActivitySchema::default()) {
            prop_assert!(located(&e), "{e:?}");
        }
        let t = GtfsTables { stop_times: text.clone(), ..gtfs() };
        if let Err(e) = parse_gtfs_tables(&t) {
            prop_assert!(located(&e), "{e:?}");
        }
    }
}
