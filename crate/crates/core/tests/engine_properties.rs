use proptest::prelude::*;

use transit_epi_core::engine::{run_epidemic, DiseaseParams};
use transit_epi_core::ingest::{generate_grid_feed, generate_synthetic_population, GridFeedConfig, LocationId, PersonId};
use transit_epi_core::network::{build_contacts, ContactEvent, ContactGraph, ContactKind, Venue};
use transit_epi_core::transit::{assign_rider_itineraries, compute_copresence};

fn graph_from(m: u32, edges: &[(u32, u32, u8, u16)]) -> ContactGraph {
    let kinds = [ContactKind::Home, ContactKind::Work, ContactKind::Other, ContactKind::Transit];
    let events = edges
        .iter()
        .filter(|(a, b, _, _)| a % m != b % m)
        .enumerate()
        .map(|(k, &(a, b, kind, minutes))| {
            let kind = kinds[kind as usize % kinds.len()];
            let venue = if kind.is_transit() { Venue::Vehicle(k as u32) } else { Venue::Place(LocationId(k as u32)) };
            ContactEvent::new(PersonId(a % m), PersonId(b % m), kind, venue, f64::from(minutes % 1440 + 1))
        })
        .collect();
    ContactGraph::from_events(m as usize, events).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compartments_are_conserved(
        m in 2u32..80,
        edges in proptest::collection::vec((any::<u32>(), any::<u32>(), any::<u8>(), any::<u16>()), 0..300),
        beta in 0.0f64..=1.0,
        latent in 0u32..3,
        infectious in 1u32..6,
        h in prop_oneof![Just(f64::INFINITY), 1.0f64..200.0],
        seed in any::<u64>(),
    ) {
        let g = graph_from(m, &edges);
        let params = DiseaseParams { beta, latent_days: latent, infectious_days: infectious, h_threshold_minutes: h, ..DiseaseParams::default() };
        let series = run_epidemic(&g, &params, 1, 30, seed).unwrap();
        prop_assert_eq!(series.len(), 31);
        let mut prev = &series[0];
        prop_assert_eq!((prev.s, prev.i), (m as usize - 1, 1));
        for c in &series[1..] {
            prop_assert_eq!(c.total(), m as usize);
            prop_assert!(c.s <= prev.s && c.r >= prev.r);
            prop_assert_eq!(prev.s - c.s, c.new_infections);
            prev = c;
        }
        prop_assert_eq!(run_epidemic(&g, &params, 1, 30, seed).unwrap(), series);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let feed = generate_grid_feed(&GridFeedConfig::default());
    let town = generate_synthetic_population(1500, 620, &feed, 2).unwrap();
    let riders = assign_rider_itineraries(&town, &feed, 0.0, 2);
    let graph = build_contacts(&town, &compute_copresence(&riders)).unwrap();
    let params = DiseaseParams { beta: 0.02, ..DiseaseParams::default() };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_epidemic(&graph, &params, 10, 60, 99).unwrap())
    };
    let one = run(1);
    assert!(one.iter().map(|c| c.new_infections).sum::<usize>() > 100);
    for threads in [2, 3, 8] {
        assert_eq!(run(threads), one);
    }
}
