use super::contacts::{ContactEvent, ContactKind, Venue};
use super::NetworkError;
use crate::ingest::{PersonId, MINUTES_PER_DAY};

/// One adjacency entry: a neighbor reached through one contact event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub neighbor: PersonId,
    pub kind: ContactKind,
    pub venue: Venue,
    pub minutes: f64,
}

/// Symmetric, loop-free contact multigraph over `m` persons, stored as
/// compressed adjacency lists. Parallel entries between the same pair are
/// kept when they come from different venues.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactGraph {
    offsets: Vec<usize>,
    contacts: Vec<Contact>,
    events: Vec<ContactEvent>,
}

impl ContactGraph {
    pub fn from_events(person_count: usize, events: Vec<ContactEvent>) -> Result<ContactGraph, NetworkError> {
        let mut degree = vec![0usize; person_count];
        for e in &events {
            for p in [e.i, e.j] {
                if p.index() >= person_count {
                    return Err(NetworkError::UnknownPerson(p));
                }
            }
            if e.i >= e.j {
                return Err(NetworkError::NonCanonicalEvent(e.i, e.j));
            }
            if !(e.minutes > 0.0 && e.minutes <= f64::from(MINUTES_PER_DAY)) {
                return Err(NetworkError::InvalidMinutes(e.i, e.j, e.minutes));
            }
            degree[e.i.index()] += 1;
            degree[e.j.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(person_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..person_count].to_vec();
        let placeholder = Contact {
            neighbor: PersonId(0),
            kind: ContactKind::Home,
            venue: Venue::Vehicle(0),
            minutes: 0.0,
        };
        let mut contacts = vec![placeholder; offsets[person_count]];
        for e in &events {
            for (a, b) in [(e.i, e.j), (e.j, e.i)] {
                contacts[fill[a.index()]] = Contact {
                    neighbor: b,
                    kind: e.kind,
                    venue: e.venue,
                    minutes: e.minutes,
                };
                fill[a.index()] += 1;
            }
        }
        for p in 0..person_count {
            contacts[offsets[p]..offsets[p + 1]].sort_by_key(|c| (c.neighbor, c.kind, c.venue));
        }
        Ok(ContactGraph { offsets, contacts, events })
    }

    /// Number of persons (`m`), including isolated ones.
    pub fn person_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Adjacency of `p`, sorted by (neighbor, kind, venue).
    pub fn neighbors(&self, p: PersonId) -> &[Contact] {
        &self.contacts[self.offsets[p.index()]..self.offsets[p.index() + 1]]
    }

    /// Offset of `p`'s adjacency in the flat entry array (see [`Self::entries`]).
    pub fn offset(&self, p: PersonId) -> usize {
        self.offsets[p.index()]
    }

    pub fn entries(&self) -> &[Contact] {
        &self.contacts
    }

    /// The canonical events the graph was built from, in build order.
    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn count_kind(&self, kind: ContactKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}
