use super::graph::ContactGraph;
use super::NetworkError;
use crate::ingest::PersonId;

/// Per-person degree split by edge class: distinct neighbors met on transit
/// (`k_bus`) and distinct neighbors met anywhere else (`k_nonbus`). A
/// neighbor met both ways counts once in each, so `k = k_bus + k_nonbus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDecomposition {
    k_bus: Vec<u32>,
    k_nonbus: Vec<u32>,
}

impl DegreeDecomposition {
    pub fn new(k_bus: Vec<u32>, k_nonbus: Vec<u32>) -> Result<Self, NetworkError> {
        if k_bus.len() != k_nonbus.len() {
            return Err(NetworkError::LengthMismatch(k_bus.len(), k_nonbus.len()));
        }
        Ok(DegreeDecomposition { k_bus, k_nonbus })
    }

    pub fn len(&self) -> usize {
        self.k_bus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_bus.is_empty()
    }

    pub fn k_bus(&self) -> &[u32] {
        &self.k_bus
    }

    pub fn k_nonbus(&self) -> &[u32] {
        &self.k_nonbus
    }

    pub fn k(&self, i: usize) -> u32 {
        self.k_bus[i] + self.k_nonbus[i]
    }

    /// Iterates `(k_bus, k_nonbus)` per person.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.k_bus.iter().copied().zip(self.k_nonbus.iter().copied())
    }
}

pub fn degree_decompose(graph: &ContactGraph) -> DegreeDecomposition {
    let m = graph.person_count();
    let mut k_bus = Vec::with_capacity(m);
    let mut k_nonbus = Vec::with_capacity(m);
    for p in 0..m {
        let (mut bus, mut nonbus) = (0u32, 0u32);
        // Entries are sorted by neighbor, so distinct neighbors per class
        // can be counted in one pass.
        let mut last_bus = None;
        let mut last_nonbus = None;
        for c in graph.neighbors(PersonId(p as u32)) {
            let last = if c.kind.is_transit() { &mut last_bus } else { &mut last_nonbus };
            if *last != Some(c.neighbor) {
                *last = Some(c.neighbor);
                if c.kind.is_transit() {
                    bus += 1;
                } else {
                    nonbus += 1;
                }
            }
        }
        k_bus.push(bus);
        k_nonbus.push(nonbus);
    }
    DegreeDecomposition { k_bus, k_nonbus }
}

/// Population means of the degree classes and their products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeMoments {
    pub mean_k: f64,
    pub mean_k2: f64,
    pub mean_kbus: f64,
    pub mean_knonbus: f64,
    pub mean_kbus2: f64,
    pub mean_knonbus2: f64,
    /// ⟨k_bus · k_nonbus⟩
    pub mean_cross: f64,
}

pub fn degree_moments(decomp: &DegreeDecomposition) -> Result<DegreeMoments, NetworkError> {
    if decomp.is_empty() {
        return Err(NetworkError::EmptyPopulation);
    }
    let m = decomp.len() as f64;
    let mut sums = [0f64; 7];
    for (b, n) in decomp.iter() {
        let (b, n) = (f64::from(b), f64::from(n));
        let k = b + n;
        sums[0] += k;
        sums[1] += k * k;
        sums[2] += b;
        sums[3] += n;
        sums[4] += b * b;
        sums[5] += n * n;
        sums[6] += b * n;
    }
    let [k, k2, b, n, b2, n2, cross] = sums.map(|s| s / m);
    Ok(DegreeMoments {
        mean_k: k,
        mean_k2: k2,
        mean_kbus: b,
        mean_knonbus: n,
        mean_kbus2: b2,
        mean_knonbus2: n2,
        mean_cross: cross,
    })
}
