use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{InterventionAlpha, ThresholdError};
use crate::network::DegreeDecomposition;
use crate::rng::{domain, stream};

/// Monte Carlo estimates over independent configuration-model realisations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    /// Mean size of the component containing a uniformly random node.
    pub mean_component_size: f64,
    pub mean_component_size_se: f64,
    /// Same, restricted to roots outside the largest component.
    pub mean_small_component_size: f64,
    pub giant_fraction: f64,
    pub giant_fraction_se: f64,
    pub samples: usize,
}

struct Realisation {
    nodes: usize,
    edges: Vec<(u32, u32)>,
    keep: Vec<f64>,
}

fn realise(decomp: &DegreeDecomposition, alpha: f64, seed: u64, sample: u64) -> Realisation {
    let mut rng = stream(seed, domain::PERCOLATION, sample, 0);
    let mut stubs = Vec::new();
    for (i, (b, n)) in decomp.iter().enumerate() {
        let scaled = alpha * f64::from(b);
        let whole = scaled.floor();
        let extra = u32::from(rng.random::<f64>() < scaled - whole);
        let k = n + whole as u32 + extra;
        stubs.extend(std::iter::repeat_n(i as u32, k as usize));
    }
    if stubs.len() % 2 == 1 {
        stubs.push(rng.random_range(0..decomp.len() as u32));
    }
    stubs.shuffle(&mut rng);
    let edges: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let keep = (0..edges.len()).map(|_| rng.random::<f64>()).collect();
    Realisation { nodes: decomp.len(), edges, keep }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Component sizes after keeping edges with `keep < t`.
fn component_sizes(r: &Realisation, t: f64) -> Vec<u32> {
    let mut parent: Vec<u32> = (0..r.nodes as u32).collect();
    let mut size = vec![1u32; r.nodes];
    for (&(a, b), &u) in r.edges.iter().zip(&r.keep) {
        if u >= t {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (big, small) = if size[ra as usize] >= size[rb as usize] { (ra, rb) } else { (rb, ra) };
            parent[small as usize] = big;
            size[big as usize] += size[small as usize];
        }
    }
    (0..r.nodes as u32).filter(|&i| parent[i as usize] == i).map(|i| size[i as usize]).collect()
}

struct SampleStats {
    mean_size: f64,
    small_size: f64,
    giant: f64,
}

fn stats(sizes: &[u32], m: usize) -> SampleStats {
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let sq: f64 = sizes.iter().map(|&s| f64::from(s).powi(2)).sum();
    let rest = m as f64 - f64::from(largest);
    SampleStats {
        mean_size: sq / m as f64,
        small_size: if rest > 0.0 { (sq - f64::from(largest).powi(2)) / rest } else { 0.0 },
        giant: f64::from(largest) / m as f64,
    }
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn check(decomp: &DegreeDecomposition, samples: usize) -> Result<(), ThresholdError> {
    if decomp.is_empty() {
        return Err(ThresholdError::EmptyPopulation);
    }
    if samples == 0 {
        return Err(ThresholdError::NoSamples);
    }
    Ok(())
}

/// Bond percolation on configuration-model graphs with the intervened
/// degree sequence. Fractional transit degrees `alpha * k_bus` are rounded
/// stochastically; an odd stub total gets one extra stub on a random node.
pub fn percolation_oracle(
    decomp: &DegreeDecomposition,
    alpha: InterventionAlpha,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<OracleEstimate, ThresholdError> {
    check(decomp, samples)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(ThresholdError::InvalidTransmissibility(t));
    }
    let per_sample: Vec<SampleStats> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let r = realise(decomp, alpha.value(), seed, s);
            stats(&component_sizes(&r, t), r.nodes)
        })
        .collect();
    let (mean_component_size, mean_component_size_se) = mean_se(per_sample.iter().map(|s| s.mean_size));
    let (giant_fraction, giant_fraction_se) = mean_se(per_sample.iter().map(|s| s.giant));
    let (mean_small_component_size, _) = mean_se(per_sample.iter().map(|s| s.small_size));
    Ok(OracleEstimate {
        mean_component_size,
        mean_component_size_se,
        mean_small_component_size,
        giant_fraction,
        giant_fraction_se,
        samples,
    })
}

/// Smallest transmissibility at which the mean largest-component fraction
/// reaches `fraction`, found by bisection over common realisations.
pub fn giant_emergence(
    decomp: &DegreeDecomposition,
    alpha: InterventionAlpha,
    fraction: f64,
    samples: usize,
    seed: u64,
) -> Result<f64, ThresholdError> {
    check(decomp, samples)?;
    let realisations: Vec<Realisation> =
        (0..samples as u64).into_par_iter().map(|s| realise(decomp, alpha.value(), seed, s)).collect();
    let giant_at = |t: f64| -> f64 {
        let total: f64 = realisations
            .par_iter()
            .map(|r| stats(&component_sizes(r, t), r.nodes).giant)
            .sum();
        total / samples as f64
    };
    if giant_at(1.0) < fraction {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if giant_at(mid) >= fraction {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(k: u32, m: usize) -> DegreeDecomposition {
        DegreeDecomposition::new(vec![0; m], vec![k; m]).unwrap()
    }

    #[test]
    fn extremes() {
        let d = regular(3, 200);
        let none = percolation_oracle(&d, InterventionAlpha::NONE, 0.0, 4, 1).unwrap();
        assert_eq!(none.mean_component_size, 1.0);
        assert_eq!(none.giant_fraction, 1.0 / 200.0);
        let all = percolation_oracle(&d, InterventionAlpha::NONE, 1.0, 4, 1).unwrap();
        assert!(all.giant_fraction > 0.9);
    }

    #[test]
    fn deterministic_for_seed() {
        let d = regular(3, 300);
        let a = percolation_oracle(&d, InterventionAlpha::NONE, 0.3, 8, 9).unwrap();
        let b = percolation_oracle(&d, InterventionAlpha::NONE, 0.3, 8, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stub_count_preserved() {
        let d = DegreeDecomposition::new(vec![3, 1, 2, 0], vec![1, 1, 1, 2]).unwrap();
        let r = realise(&d, 1.0, 4, 0);
        assert_eq!(r.edges.len(), 6);
        let odd = DegreeDecomposition::new(vec![0, 0, 0], vec![1, 1, 1]).unwrap();
        assert_eq!(realise(&odd, 1.0, 4, 0).edges.len(), 2);
    }

    #[test]
    fn errors() {
        let d = regular(3, 10);
        assert_eq!(percolation_oracle(&d, InterventionAlpha::NONE, 0.5, 0, 1), Err(ThresholdError::NoSamples));
        assert!(percolation_oracle(&d, InterventionAlpha::NONE, -0.1, 3, 1).is_err());
    }
}
