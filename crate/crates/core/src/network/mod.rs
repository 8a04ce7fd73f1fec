//! Daily contact network: co-location events, the symmetric contact graph,
//! and the transit / non-transit degree decomposition.

mod contacts;
mod degree;
mod graph;

pub use contacts::{build_contacts, build_contacts_with, place_contacts, ContactEvent, ContactKind, NetworkOptions, Venue};
pub use degree::{degree_decompose, degree_moments, DegreeDecomposition, DegreeMoments};
pub use graph::{Contact, ContactGraph};

use crate::ingest::PersonId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("contact event references unknown person {0}")]
    UnknownPerson(PersonId),
    #[error("contact event ({0}, {1}) is not canonical (need i < j)")]
    NonCanonicalEvent(PersonId, PersonId),
    #[error("contact event ({0}, {1}) has non-positive or oversized minutes {2}")]
    InvalidMinutes(PersonId, PersonId, f64),
    #[error("empty population")]
    EmptyPopulation,
    #[error("degree vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}
