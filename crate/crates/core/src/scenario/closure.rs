use crate::ingest::{ActivityRecord, LocationKind, PopulationDataset};

/// Replaces every school stay by a home stay of the same interval at the
/// person's home. Idempotent.
pub fn apply_school_closure(dataset: &PopulationDataset) -> PopulationDataset {
    let schedules: Vec<Vec<ActivityRecord>> = dataset
        .person_ids()
        .map(|p| {
            let home = dataset.home_of(p);
            dataset
                .activities(p)
                .iter()
                .map(|a| match a.kind {
                    LocationKind::School => ActivityRecord { location: home, kind: LocationKind::Home, ..*a },
                    _ => *a,
                })
                .collect()
        })
        .collect();
    dataset
        .with_schedules(schedules)
        .expect("same intervals at a valid home location stay valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Location, LocationId, PersonId};

    fn record(p: u32, start: u32, duration: u32, loc: u32, kind: LocationKind) -> ActivityRecord {
        ActivityRecord { person: PersonId(p), start, duration, location: LocationId(loc), kind }
    }

    fn town() -> PopulationDataset {
        let locations = vec![
            Location { label: "h0".into(), kind: LocationKind::Home, coord: None },
            Location { label: "h1".into(), kind: LocationKind::Home, coord: None },
            Location { label: "s".into(), kind: LocationKind::School, coord: None },
            Location { label: "w".into(), kind: LocationKind::Work, coord: None },
        ];
        let student = vec![
            record(0, 0, 480, 0, LocationKind::Home),
            record(0, 480, 420, 2, LocationKind::School),
            record(0, 900, 540, 0, LocationKind::Home),
        ];
        let worker = vec![
            record(1, 0, 480, 1, LocationKind::Home),
            record(1, 480, 480, 3, LocationKind::Work),
            record(1, 960, 480, 1, LocationKind::Home),
        ];
        PopulationDataset::new(vec!["a".into(), "b".into()], vec![student, worker], locations, vec![]).unwrap()
    }

    #[test]
    fn student_goes_home() {
        let closed = apply_school_closure(&town());
        assert_eq!(closed.activities(PersonId(0))[1], record(0, 480, 420, 0, LocationKind::Home));
        assert_eq!(closed.activities(PersonId(1)), town().activities(PersonId(1)));
    }

    #[test]
    fn idempotent() {
        let once = apply_school_closure(&town());
        assert_eq!(apply_school_closure(&once), once);
    }
}
